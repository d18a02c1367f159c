"""Order reduction: an order-(r+1) formula over a structure becomes an
order-r formula over a structure with ``2**(n**a)`` elements.

Element ``x`` of the target stands for source element ``x`` when ``x < n``
and, when ``x < 2**(n**b)``, for the b-ary second-order relation whose
code (see :mod:`hoq.encoder`) is ``x``.  Source elements are relabelled by
their rank in the source order ``lt`` so both orders agree.  The target
vocabulary has the natural order ``lt``, the constant ``n`` and the
membership predicates ``T1..Ta`` with ``Tb(x0, x1..xb)`` true iff
``x0 < 2**(n**b)`` and the tuple ``x1..xb`` belongs to the relation coded
by ``x0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .encoder import Value, position
from .errors import StructureError, TargetTooLarge, UnsupportedNode
from .evaluator import evaluate
from .formulas import ORDER_SYMBOL, ORDER_TYPE, FreshNames, Predicate
from .limits import DEFAULT_LIMITS, Limits
from .structures import Structure
from .syntax import (
    EXISTS,
    FORALL,
    TRUE,
    AFix,
    And,
    Apply,
    Binder,
    Equal,
    Fix,
    Formula,
    Lit,
    NFix,
    Not,
    Or,
    Quant,
    TC,
    Term,
    Truth,
    all_names,
    conj,
    disj,
    pred_type,
    walk,
)
from .types import IOTA, TypeExpr, arity_type, tuple_type

SIZE_SYMBOL = "n"


@lru_cache(maxsize=None)
def lower_type(t: TypeExpr) -> TypeExpr:
    """Second-order types become elements; higher ones lose one order."""
    if t.is_iota or t.order == 2:
        return IOTA
    return TypeExpr(tuple(lower_type(c) for c in t.children))


def second_order_arities(t: TypeExpr) -> set[int]:
    if t.is_iota:
        return set()
    if t.order == 2:
        return {t.arity}
    out = set()
    for c in t.children:
        out |= second_order_arities(c)
    return out


def _membership_name(b: int) -> str:
    return f"T{b}"


@dataclass(frozen=True)
class ReductionPlan:
    a: int
    source: dict[str, TypeExpr]
    target: dict[str, TypeExpr]
    names: dict[str, str]  # source symbol -> target symbol
    universe_size: int  # source n; the target size depends on it

    @property
    def target_size(self) -> int:
        return 2 ** (self.universe_size**self.a)

    def membership(self, b: int) -> str:
        return _membership_name(b)


def _formula_types(f: Formula) -> list[TypeExpr]:
    out = []
    for g in walk(f):
        if isinstance(g, Quant):
            out.append(g.type)
        elif isinstance(g, TC):
            out.extend(b.type for b in g.xs + g.ys)
        elif isinstance(g, (Fix, NFix, AFix)):
            out.extend(b.type for b in g.xs)
    return out


def plan(vocabulary: Mapping[str, TypeExpr], f: Formula, n: int,
         limits: Limits = DEFAULT_LIMITS) -> ReductionPlan:
    """Target arity bound, vocabulary and size for structures of size ``n``."""
    vocabulary = dict(vocabulary)
    if vocabulary.get(ORDER_SYMBOL) != ORDER_TYPE:
        raise StructureError(f"the vocabulary needs the order symbol {ORDER_SYMBOL}:(i,i)")
    arities = {1}
    for name, t in vocabulary.items():
        if name != ORDER_SYMBOL:
            arities |= second_order_arities(t)
    for t in _formula_types(f):
        arities |= second_order_arities(t)
    a = max(arities)
    exponent = n**a
    if exponent >= 64 or 2**exponent > limits.max_target_universe:
        raise TargetTooLarge(
            f"target universe 2**{exponent} exceeds limit {limits.max_target_universe}")
    reserved = {ORDER_SYMBOL, SIZE_SYMBOL} | {_membership_name(b) for b in range(1, a + 1)}
    target = {ORDER_SYMBOL: ORDER_TYPE, SIZE_SYMBOL: IOTA}
    for b in range(1, a + 1):
        target[_membership_name(b)] = tuple_type(*([IOTA] * (b + 1)))
    names = {ORDER_SYMBOL: ORDER_SYMBOL}
    for name, t in vocabulary.items():
        if name == ORDER_SYMBOL:
            continue
        new = name
        while new in reserved or new in target:
            new = "V_" + new
        names[name] = new
        target[new] = lower_type(t)
    return ReductionPlan(a, vocabulary, target, names, n)


# -- structures ------------------------------------------------------------

def order_ranks(s: Structure) -> list[int]:
    """Rank of each element in the interpretation of ``lt``; checks it is a strict total order."""
    lt = s[ORDER_SYMBOL]
    n = s.universe_size
    ranks = [sum(1 for d in range(n) if (d, e) in lt) for e in range(n)]
    ok = sorted(ranks) == list(range(n)) and all(
        ((d, e) in lt) == (ranks[d] < ranks[e]) for d in range(n) for e in range(n))
    if not ok:
        raise StructureError(f"{ORDER_SYMBOL} is not a strict total order")
    return ranks


def lower_value(v: Value, t: TypeExpr, n: int, ranks: list[int]) -> Value:
    """The target value standing for source value ``v`` of type ``t``."""
    if t.is_iota:
        return ranks[v]
    if t.order == 2:
        code = 0
        for tup in v:
            code |= 1 << position(tuple(ranks[x] for x in tup), t, n)
        return code
    return frozenset(
        tuple(lower_value(c, ct, n, ranks) for c, ct in zip(tup, t.children)) for tup in v
    )


def reduce_structure(p: ReductionPlan, s: Structure) -> Structure:
    n = s.universe_size
    if n != p.universe_size:
        raise StructureError(f"plan was made for universe size {p.universe_size}, got {n}")
    if dict(s.vocabulary) != p.source:
        raise StructureError("structure vocabulary differs from the plan's source vocabulary")
    ranks = order_ranks(s)
    size = p.target_size
    interp: dict[str, Value] = {
        ORDER_SYMBOL: frozenset((i, j) for i in range(size) for j in range(i + 1, size)),
        SIZE_SYMBOL: n,
    }
    for b in range(1, p.a + 1):
        tuples = list(itertools.product(range(n), repeat=b))
        rows = []
        for code in range(2 ** (n**b)):
            for pos, tup in enumerate(tuples):
                if code >> pos & 1:
                    rows.append((code,) + tup)
        interp[_membership_name(b)] = frozenset(rows)
    for name, t in p.source.items():
        if name != ORDER_SYMBOL:
            interp[p.names[name]] = lower_value(s[name], t, n, ranks)
    return Structure(size, p.target, interp)


# -- formulas --------------------------------------------------------------

class _Reducer:
    def __init__(self, p: ReductionPlan, f: Formula):
        self.p = p
        self.fresh = FreshNames(all_names(f) | set(p.target) | set(p.source))

    def is_zero(self, x: str) -> Formula:
        y = self.fresh("y")
        return Not(Quant(EXISTS, y, IOTA, Apply(ORDER_SYMBOL, (y, x))))

    def acc_base(self, x: Term, b: int) -> Formula:
        """``x`` codes a b-ary relation, i.e. ``x < 2**(n**b)``."""
        a = self.p.a
        if b >= a:
            return TRUE
        xs = [self.fresh("x") for _ in range(a)]
        body = disj(Not(Apply(_membership_name(a), (x, *xs))), conj(*(self.is_zero(v) for v in xs[: a - b])))
        for v in reversed(xs):
            body = Quant(FORALL, v, IOTA, body)
        return body

    def acc(self, x: Term, t: TypeExpr) -> Formula:
        """``x`` (a target value) is the image of a source value of type ``t``."""
        if t.is_iota:
            return Apply(ORDER_SYMBOL, (x, SIZE_SYMBOL))
        if t.order == 2:
            return self.acc_base(x, t.arity)
        ys = [self.fresh("y") for _ in t.children]
        inner = conj(*(self.acc(y, c) for y, c in zip(ys, t.children)))
        if inner == TRUE:
            return TRUE
        body = disj(Not(Apply(x, tuple(ys))), inner)
        for y, c in reversed(list(zip(ys, t.children))):
            body = Quant(FORALL, y, lower_type(c), body)
        return body

    def term(self, t: Term) -> Term:
        if isinstance(t, Lit):
            if t.kind == "top":
                raise UnsupportedNode("top literals have no image under order reduction")
            if t.type.is_iota:
                # element 0 is not invariant under relabelling by the order
                raise UnsupportedNode("element literals have no image under order reduction")
            return Lit("bot", lower_type(t.type))
        return self.p.names.get(t, t) if t in self.p.source else t

    def type_of(self, t: Term, env) -> TypeExpr:
        if isinstance(t, Lit):
            return t.type
        if t in env:
            return env[t][0]
        return self.p.source[t]

    def run(self, f: Formula, env: dict) -> Formula:
        if isinstance(f, Truth):
            return f
        if isinstance(f, Apply):
            args = tuple(self.term(a) for a in f.args)
            head_type = self.type_of(f.head, env)
            keep = f.head in env and env[f.head][1]
            if f.head == ORDER_SYMBOL and f.head not in env:
                return Apply(ORDER_SYMBOL, args)
            if head_type.order == 2 and not keep:
                return Apply(_membership_name(head_type.arity), (self.term(f.head),) + args)
            return Apply(self.term(f.head), args)
        if isinstance(f, Equal):
            t = lower_type(f.type) if f.type is not None else None
            return Equal(self.term(f.lhs), self.term(f.rhs), t)
        if isinstance(f, Not):
            return Not(self.run(f.child, env))
        if isinstance(f, (And, Or)):
            return type(f)(tuple(self.run(c, env) for c in f.children))
        if isinstance(f, Quant):
            body = self.run(f.body, {**env, f.var: (f.type, False)})
            guard = self.acc(f.var, f.type)
            if f.kind == EXISTS:
                body = conj(guard, body)
            elif guard != TRUE:
                body = disj(Not(guard), body)
            return Quant(f.kind, f.var, lower_type(f.type), body)
        if isinstance(f, TC):
            inner = {**env, **{b.name: (b.type, False) for b in f.xs + f.ys}}
            guards = [self.acc(b.name, b.type) for b in f.xs + f.ys]
            xs = tuple(Binder(b.name, lower_type(b.type)) for b in f.xs)
            ys = tuple(Binder(b.name, lower_type(b.type)) for b in f.ys)
            return TC(xs, ys, conj(*guards, self.run(f.body, inner)),
                      tuple(map(self.term, f.zs)), tuple(map(self.term, f.ts)))
        if isinstance(f, Fix):
            inner = {**env, f.pred: (pred_type(f.xs), True),
                     **{b.name: (b.type, False) for b in f.xs}}
            guards = [self.acc(b.name, b.type) for b in f.xs]
            xs = tuple(Binder(b.name, lower_type(b.type)) for b in f.xs)
            return Fix(f.kind, f.pred, xs, conj(*guards, self.run(f.body, inner)),
                       tuple(map(self.term, f.args)))
        if isinstance(f, (NFix, AFix)):
            raise UnsupportedNode(f"{f.kind} has no order-reduction rule")
        raise TypeError(f"not a formula: {f!r}")


def reduce_formula(p: ReductionPlan, f: Formula) -> Formula:
    """The translated formula over the target vocabulary."""
    from .check import typecheck

    f = typecheck(f, p.source)
    return _Reducer(p, f).run(f, {})


def gen_acc(q: int, b: int, a: int | None = None) -> Predicate:
    """``acc`` for a target variable ``X`` of arity ``b`` and order ``q``.

    ``a`` is the plan's arity bound (defaults to ``b``).
    """
    if q < 1 or b < 1:
        raise ValueError("order and arity must be >= 1")
    a = max(a or b, b)
    source = arity_type(b, q + 1)
    p = ReductionPlan(a, {ORDER_SYMBOL: ORDER_TYPE}, {}, {ORDER_SYMBOL: ORDER_SYMBOL}, 1)
    free = {ORDER_SYMBOL: ORDER_TYPE, SIZE_SYMBOL: IOTA}
    for k in range(1, a + 1):
        free[_membership_name(k)] = tuple_type(*([IOTA] * (k + 1)))
    free["X"] = lower_type(source)
    return Predicate("acc", _Reducer(p, TRUE).acc("X", source), free)


def check_reduction(p: ReductionPlan, s: Structure, f: Formula,
                    limits: Limits = DEFAULT_LIMITS) -> bool:
    """Both sides of the reduction agree on ``s``."""
    source = evaluate(s, f, limits=limits)
    target = evaluate(reduce_structure(p, s), reduce_formula(p, f), limits=limits)
    return source == target


def reduction_values(p: ReductionPlan, s: Structure, f: Formula,
                     limits: Limits = DEFAULT_LIMITS) -> tuple[bool, bool]:
    source = evaluate(s, f, limits=limits)
    target = evaluate(reduce_structure(p, s), reduce_formula(p, f), limits=limits)
    return source, target
