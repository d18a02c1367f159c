"""Semantics-preserving rewrites into prefix, step, arity and decreasing
normal forms, plus the operator normal form check and the monadic lint.

All rewrites assume bound names are pairwise distinct and distinct from
free names; the entry points alpha-rename first when that does not hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Mapping

from .check import alpha_rename, count_blocks, is_prenex, max_quantified_order, names_distinct, prefix
from .errors import NormalizationError
from .formulas import FreshNames
from .syntax import (
    EXISTS,
    FALSE,
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
    dual,
    free_vars,
    is_operator,
    map_subformulas,
    neg,
    pred_type,
    rename_free,
    subformulas,
    walk,
)
from .types import (
    TypeExpr,
    arity_type,
    is_arity_type,
    is_monadic,
    is_step_type,
    max_tuple_size,
)


class Polarity(Enum):
    POS = "+"
    NEG = "-"

    def __neg__(self) -> "Polarity":
        return Polarity.NEG if self is Polarity.POS else Polarity.POS

    def __mul__(self, other: "Polarity") -> "Polarity":
        return Polarity.POS if self is other else Polarity.NEG

    def kind(self, q: str) -> str:
        return q if self is Polarity.POS else dual(q)

    def connective(self, cls):
        if self is Polarity.POS:
            return cls
        return Or if cls is And else And


POS, NEG = Polarity.POS, Polarity.NEG


def _distinct(f: Formula) -> Formula:
    return f if names_distinct(f) else alpha_rename(f)


def _combine(cls, a: Formula, b: Formula) -> Formula:
    return conj(a, b) if cls is And else disj(a, b)


def _rebuild(quants: list[Quant], body: Formula) -> Formula:
    for q in reversed(quants):
        body = Quant(q.kind, q.var, q.type, body)
    return body


# -- prefix normal form ----------------------------------------------------

def _aux(r: int, f: Formula, q: str, pol: Polarity) -> Formula:
    if isinstance(f, Quant):
        kind = pol.kind(f.kind)
        last = kind if f.type.order == r else q
        return Quant(kind, f.var, f.type, _aux(r, f.body, last, pol))
    if isinstance(f, Not):
        return _aux(r, f.child, q, -pol)
    if isinstance(f, (And, Or)):
        op = pol.connective(type(f))
        acc = _aux(r, f.children[0], q, pol)
        for c in f.children[1:]:
            acc = _aux1(r, acc, _aux(r, c, q, pol), q, op)
        return acc
    return f if pol is POS else neg(f)


def _aux1(r: int, phi: Formula, psi: Formula, q: str, op) -> Formula:
    """Merge two prenex formulas, pulling order-``r`` quantifiers of kind ``q`` first."""
    out = []
    while True:
        if not isinstance(phi, Quant):
            return _rebuild(out, _aux2(psi, phi, op, flipped=True))
        if phi.type.order < r or phi.kind == q:
            out.append(phi)
            phi = phi.body
            continue
        if not isinstance(psi, Quant):
            return _rebuild(out, _aux2(phi, psi, op, flipped=False))
        if psi.type.order < r or psi.kind == q:
            out.append(psi)
            psi = psi.body
            continue
        q = dual(q)


def _aux2(first: Formula, second: Formula, op, flipped: bool) -> Formula:
    quants, matrix = prefix(first)
    body = _combine(op, second, matrix) if flipped else _combine(op, matrix, second)
    return _rebuild(quants, body)


def to_pnf(r: int | None, f: Formula, start: str = EXISTS) -> Formula:
    """Prefix normal form keeping order-``r`` alternations low."""
    f = _distinct(f)
    if r is None:
        r = max_quantified_order(f)
    return _aux(r, f, start, POS)


def to_pnf_co(r: int | None, f: Formula) -> Formula:
    return to_pnf(r, f, FORALL)


def alternations(f: Formula, r: int, start: str = EXISTS) -> int:
    """Kind changes among order-``r`` prefix quantifiers, counting a change from ``start``."""
    quants, _ = prefix(f)
    last, n = start, 0
    for q in quants:
        if q.type.order == r:
            if q.kind != last:
                n += 1
            last = q.kind
    return n


def alternation_bound(r: int, f: Formula, start: str = EXISTS, pol: Polarity = POS) -> int:
    """The recursive max-of-parts bound on ``alternations(to_pnf(r, f), r, start)``."""
    if isinstance(f, Quant):
        if f.type.order == r:
            kind = pol.kind(f.kind)
            return (kind != start) + alternation_bound(r, f.body, kind, pol)
        return alternation_bound(r, f.body, start, pol)
    if isinstance(f, Not):
        return alternation_bound(r, f.child, start, -pol)
    if isinstance(f, (And, Or)):
        return max(alternation_bound(r, c, start, pol) for c in f.children)
    return 0


def order_block_count(f: Formula, r: int) -> int:
    quants, _ = prefix(f)
    return count_blocks([q.kind for q in quants if q.type.order == r])


def best_pnf(r: int | None, f: Formula) -> Formula:
    """The variant with fewer order-``r`` blocks; the existential one on ties."""
    f = _distinct(f)
    if r is None:
        r = max_quantified_order(f)
    a, b = to_pnf(r, f), to_pnf_co(r, f)
    return b if order_block_count(b, r) < order_block_count(a, r) else a


# -- typing helpers --------------------------------------------------------

class _Typed:
    """Shared bookkeeping: types of free symbols and bound names, fresh names."""

    def __init__(self, f: Formula, vocabulary: Mapping[str, TypeExpr] | None):
        self.vocabulary = dict(vocabulary or {})
        self.fresh = FreshNames(all_names(f) | set(self.vocabulary))
        missing = sorted(free_vars(f) - set(self.vocabulary))
        if missing:
            raise NormalizationError(f"types of free symbols {missing} are unknown")

    def type_of(self, t: Term, env: Mapping[str, TypeExpr]) -> TypeExpr:
        if isinstance(t, Lit):
            return t.type
        if t in env:
            return env[t]
        return self.vocabulary[t]


def _binder_env(f: Formula) -> dict[str, TypeExpr]:
    if isinstance(f, Quant):
        return {f.var: f.type}
    if isinstance(f, TC):
        return {b.name: b.type for b in f.xs + f.ys}
    if isinstance(f, (Fix, NFix, AFix)):
        return {f.pred: pred_type(f.xs), **{b.name: b.type for b in f.xs}}
    return {}


def formula_types(f: Formula) -> list[TypeExpr]:
    """Types of every binder, fixpoint predicate and literal in ``f``."""
    out = []
    for g in walk(f):
        out.extend(_binder_env(g).values())
        for t in _outer_terms(g):
            if isinstance(t, Lit):
                out.append(t.type)
        if isinstance(g, Equal) and g.type is not None:
            out.append(g.type)
    return out


def _outer_terms(g: Formula):
    if isinstance(g, Apply):
        return g.args
    if isinstance(g, Equal):
        return (g.lhs, g.rhs)
    if isinstance(g, TC):
        return g.zs + g.ts
    if isinstance(g, (Fix, NFix, AFix)):
        return g.args
    return ()


def _quant_guard(kind: str, var: str, t: TypeExpr, guard: Formula, body: Formula) -> Formula:
    if kind == EXISTS:
        return Quant(kind, var, t, conj(guard, body))
    if guard == TRUE:
        return Quant(kind, var, t, body)
    return Quant(kind, var, t, disj(Not(guard), body))


# -- step normal form ------------------------------------------------------

@lru_cache(maxsize=None)
def wrap_type(s: TypeExpr, order: int) -> TypeExpr:
    while s.order < order:
        s = TypeExpr((s,))
    return s


@lru_cache(maxsize=None)
def snf_type(t: TypeExpr) -> TypeExpr:
    """Lower-order components wrapped in singleton chains."""
    if t.is_iota:
        return t
    q = t.order
    return TypeExpr(tuple(wrap_type(snf_type(c), q - 1) for c in t.children))


def equiv_formula(base: Term, base_type: TypeExpr, top: str, top_type: TypeExpr,
                  fresh: FreshNames) -> Formula:
    """``top`` is the singleton chain ``{({...{(base)}...})}`` reaching ``top_type``."""
    if wrap_type(base_type, top_type.order) != top_type:
        raise NormalizationError(f"{top_type} is not a chain over {base_type}")
    chain: list[Term] = [base]
    types = [base_type]
    hidden = []
    t = base_type
    while True:
        t = TypeExpr((t,))
        if t == top_type:
            chain.append(top)
            types.append(t)
            break
        name = fresh("s")
        hidden.append((name, t))
        chain.append(name)
        types.append(t)
    parts = []
    for k in range(1, len(chain)):
        tv = fresh("t")
        parts.append(Apply(chain[k], (chain[k - 1],)))
        only = disj(Not(Apply(chain[k], (tv,))), Equal(tv, chain[k - 1], types[k - 1]))
        parts.append(Quant(FORALL, tv, types[k - 1], only))
    body = conj(*parts)
    for name, ht in reversed(hidden):
        body = Quant(EXISTS, name, ht, body)
    return body


class _Snf(_Typed):
    def __init__(self, f, vocabulary):
        super().__init__(f, vocabulary)
        for name in free_vars(f):
            if not is_step_type(self.vocabulary[name]):
                raise NormalizationError(f"vocabulary symbol {name} is not in step normal form")

    def term(self, t: Term) -> Term:
        if isinstance(t, Lit):
            st = snf_type(t.type)
            if t.kind == "top" and st != t.type:
                raise NormalizationError(f"top:{t.type} has no step normal form image")
            return Lit(t.kind, st)
        return t

    def clean(self, x: Term, t: TypeExpr) -> Formula:
        """``x`` (of type ``snf_type(t)``) is the image of a relation of type ``t``."""
        if is_step_type(t):
            return TRUE
        q = t.order
        names, types, oks = [], [], []
        for c in t.children:
            d = snf_type(c)
            w = wrap_type(d, q - 1)
            s = self.fresh("s")
            names.append(s)
            types.append(w)
            if w == d:
                oks.append(self.clean(s, c))
            else:
                u = self.fresh("u")
                oks.append(Quant(EXISTS, u, d, conj(
                    equiv_formula(u, d, s, w, self.fresh), self.clean(u, c))))
        body = disj(Not(Apply(x, tuple(names))), conj(*oks))
        for s, w in reversed(list(zip(names, types))):
            body = Quant(FORALL, s, w, body)
        return body

    def fit_args(self, args, targets, env) -> tuple[list[Term], list[tuple[str, TypeExpr]], list[Formula]]:
        new_args, hidden, guards = [], [], []
        for a, c in zip(args, targets):
            at = snf_type(self.type_of(a, env))
            a2 = self.term(a)
            if at == c:
                new_args.append(a2)
            else:
                s = self.fresh("s")
                hidden.append((s, c))
                new_args.append(s)
                guards.append(equiv_formula(a2, at, s, c, self.fresh))
        return new_args, hidden, guards

    @staticmethod
    def close(core: Formula, hidden, guards) -> Formula:
        body = conj(core, *guards)
        for s, c in reversed(hidden):
            body = Quant(EXISTS, s, c, body)
        return body

    def run(self, f: Formula, env: dict) -> Formula:
        if isinstance(f, Truth):
            return f
        if isinstance(f, Apply):
            head = snf_type(self.type_of(f.head, env))
            args, hidden, guards = self.fit_args(f.args, head.children, env)
            return self.close(Apply(f.head, tuple(args)), hidden, guards)
        if isinstance(f, Equal):
            t = snf_type(f.type) if f.type is not None else None
            return Equal(self.term(f.lhs), self.term(f.rhs), t)
        if isinstance(f, Not):
            return Not(self.run(f.child, env))
        if isinstance(f, (And, Or)):
            return type(f)(tuple(self.run(c, env) for c in f.children))
        if isinstance(f, Quant):
            inner = {**env, f.var: f.type}
            body = self.run(f.body, inner)
            return _quant_guard(f.kind, f.var, snf_type(f.type), self.clean(f.var, f.type), body)
        if isinstance(f, TC):
            inner = {**env, **_binder_env(f)}
            guards = [self.clean(b.name, b.type) for b in f.xs + f.ys]
            body = conj(*guards, self.run(f.body, inner))
            xs = tuple(Binder(b.name, snf_type(b.type)) for b in f.xs)
            ys = tuple(Binder(b.name, snf_type(b.type)) for b in f.ys)
            return TC(xs, ys, body, tuple(map(self.term, f.zs)), tuple(map(self.term, f.ts)))
        if isinstance(f, (Fix, NFix, AFix)):
            return self.fixpoint(f, env)
        raise TypeError(f"not a formula: {f!r}")

    def fixpoint(self, f, env) -> Formula:
        inner = {**env, **_binder_env(f)}
        wrapped = list(snf_type(pred_type(f.xs)).children)
        binders, hidden, links = [], [], []
        for b, w in zip(f.xs, wrapped):
            d = snf_type(b.type)
            if w == d:
                binders.append(Binder(b.name, d))
            else:
                new = self.fresh("w")
                binders.append(Binder(new, w))
                hidden.append((b.name, d))
                links.append(equiv_formula(b.name, d, new, w, self.fresh))
            links.append(self.clean(b.name, b.type))

        def body(g):
            return self.close(self.run(g, inner), hidden, links)

        args, ahidden, aguards = self.fit_args(f.args, wrapped, env)
        if isinstance(f, Fix):
            core = Fix(f.kind, f.pred, tuple(binders), body(f.body), tuple(args))
        else:
            core = type(f)(f.kind, f.pred, tuple(binders), body(f.body0), body(f.body1), tuple(args))
        return self.close(core, ahidden, aguards)


def to_snf(f: Formula, vocabulary: Mapping[str, TypeExpr] | None = None) -> Formula:
    """Step normal form: every type of order q has only components of order q-1."""
    f = _distinct(f)
    return _Snf(f, vocabulary).run(f, {})


def is_snf(f: Formula) -> bool:
    return all(is_step_type(t) for t in formula_types(f))


# -- arity normal form -----------------------------------------------------

def anf_arity(f: Formula, vocabulary: Mapping[str, TypeExpr] | None = None) -> int:
    vocabulary = vocabulary or {}
    types = formula_types(f) + [vocabulary[n] for n in free_vars(f) if n in vocabulary]
    return max((max_tuple_size(t) for t in types), default=1)


class _Anf(_Typed):
    def __init__(self, f, vocabulary, a: int):
        super().__init__(f, vocabulary)
        self.a = a
        for t in formula_types(f) + [self.vocabulary[n] for n in free_vars(f)]:
            if not is_step_type(t):
                raise NormalizationError(f"type {t} is not in step normal form")

    def conv(self, t: TypeExpr) -> TypeExpr:
        return arity_type(self.a, t.order)

    def term(self, t: Term) -> Term:
        if isinstance(t, Lit):
            ct = self.conv(t.type)
            if t.kind == "top" and ct != t.type:
                raise NormalizationError(f"top:{t.type} has no arity normal form image")
            return Lit(t.kind, ct)
        return t

    def pad(self, args) -> tuple:
        args = tuple(self.term(a) for a in args)
        return args + (args[-1],) * (self.a - len(args))

    def enc(self, x: Term, t: TypeExpr) -> Formula:
        """``x`` (of type ``A(a, order t)``) encodes a relation of type ``t``."""
        if self.conv(t) == t:
            return TRUE
        b = t.arity
        sub = arity_type(self.a, t.order - 1)
        ys = [self.fresh("y") for _ in range(self.a)]
        parts = [Equal(ys[b - 1], ys[j], sub) for j in range(b, self.a)]
        parts += [self.enc(ys[i], c) for i, c in enumerate(t.children)]
        body = disj(Not(Apply(x, tuple(ys))), conj(*parts))
        for y in reversed(ys):
            body = Quant(FORALL, y, sub, body)
        return body

    def copy(self, r: Term, t: TypeExpr, s: str) -> Formula:
        """``s`` of type ``A(a, order t)`` is the padded copy of ``r`` of type ``t``."""
        if self.conv(t) == t:
            return Equal(r, s, t)
        sub = arity_type(self.a, t.order - 1)
        ys = [self.fresh("y") for _ in t.children]
        zs = [self.fresh("z") for _ in t.children]
        links = conj(*(self.copy(y, c, z) for y, c, z in zip(ys, t.children, zs)))
        padded = tuple(zs) + (zs[-1],) * (self.a - len(zs))
        image = disj(Not(links), Apply(s, padded))
        for z in reversed(zs):
            image = Quant(FORALL, z, sub, image)
        matched = disj(And((Apply(r, tuple(ys)), image)), And((Not(Apply(r, tuple(ys))), Not(image))))
        for y, c in reversed(list(zip(ys, t.children))):
            matched = Quant(FORALL, y, c, matched)
        return conj(self.enc(s, t), matched)

    def run(self, f: Formula, env: dict) -> Formula:
        if isinstance(f, Truth):
            return f
        if isinstance(f, Apply):
            head = self.type_of(f.head, env)
            if self.conv(head) == head:
                return Apply(f.head, tuple(self.term(a) for a in f.args))
            return Apply(f.head, self.pad(f.args))
        if isinstance(f, Equal):
            t = self.conv(f.type) if f.type is not None else None
            return Equal(self.term(f.lhs), self.term(f.rhs), t)
        if isinstance(f, Not):
            return Not(self.run(f.child, env))
        if isinstance(f, (And, Or)):
            return type(f)(tuple(self.run(c, env) for c in f.children))
        if isinstance(f, Quant):
            body = self.run(f.body, {**env, f.var: f.type})
            return _quant_guard(f.kind, f.var, self.conv(f.type), self.enc(f.var, f.type), body)
        if isinstance(f, TC):
            inner = {**env, **_binder_env(f)}
            guards = [self.enc(b.name, b.type) for b in f.xs + f.ys]
            body = conj(*guards, self.run(f.body, inner))
            xs = tuple(Binder(b.name, self.conv(b.type)) for b in f.xs)
            ys = tuple(Binder(b.name, self.conv(b.type)) for b in f.ys)
            return TC(xs, ys, body, tuple(map(self.term, f.zs)), tuple(map(self.term, f.ts)))
        if isinstance(f, (Fix, NFix, AFix)):
            inner = {**env, **_binder_env(f)}
            binders = [Binder(b.name, self.conv(b.type)) for b in f.xs]
            guards = [self.enc(b.name, b.type) for b in f.xs]
            last = binders[-1]
            for _ in range(self.a - len(binders)):
                extra = Binder(self.fresh("x"), last.type)
                guards.append(Equal(extra.name, last.name, last.type))
                binders.append(extra)
            args = self.pad(f.args)
            if isinstance(f, Fix):
                return Fix(f.kind, f.pred, tuple(binders),
                           conj(*guards, self.run(f.body, inner)), args)
            return type(f)(
                f.kind, f.pred, tuple(binders),
                conj(*guards, self.run(f.body0, inner)),
                conj(*guards, self.run(f.body1, inner)),
                args,
            )
        raise TypeError(f"not a formula: {f!r}")

    def wrap_structure(self, f: Formula) -> Formula:
        symbols = [n for n in sorted(free_vars(f)) if self.conv(self.vocabulary[n]) != self.vocabulary[n]]
        if not symbols:
            return f
        copies = {n: self.fresh(n.lstrip("_") or "r") for n in symbols}
        body = rename_free(f, copies)
        guard = conj(*(self.copy(n, self.vocabulary[n], copies[n]) for n in symbols))
        out = disj(Not(guard), body)
        for n in reversed(symbols):
            out = Quant(FORALL, copies[n], self.conv(self.vocabulary[n]), out)
        return out


def to_anf(f: Formula, vocabulary: Mapping[str, TypeExpr] | None = None,
           wrap_vocabulary: bool = True) -> Formula:
    """Arity normal form for the global arity ``a`` (largest tuple size).

    Vocabulary symbols whose type is not of arity ``a`` are replaced by
    universally quantified padded copies unless ``wrap_vocabulary`` is off.
    """
    f = _distinct(f)
    a = anf_arity(f, vocabulary)
    conv = _Anf(f, vocabulary, a)
    out = conv.run(f, {})
    if wrap_vocabulary:
        out = anf_wrap_structure(out, vocabulary, a)
    return out


def anf_wrap_structure(f: Formula, vocabulary: Mapping[str, TypeExpr] | None = None,
                       a: int | None = None) -> Formula:
    """Quantify padded copies of the vocabulary symbols not of arity ``a``."""
    vocabulary = dict(vocabulary or {})
    if a is None:
        a = anf_arity(f, vocabulary)
    used = {n: vocabulary[n] for n in free_vars(f) if n in vocabulary}
    if not used:
        return f
    return _Anf(f, used, a).wrap_structure(f)


def is_anf(f: Formula) -> bool:
    types = [t for t in formula_types(f) if not t.is_iota]
    if not types:
        return True
    a = types[0].arity
    return all(is_arity_type(t, a) for t in types)


# -- decreasing normal form ------------------------------------------------

def _uses_as_argument(f: Formula, name: str) -> bool:
    for g in walk(f):
        terms = _outer_terms(g)
        if name in terms:
            return True
    return False


def _expand_equalities(matrix: Formula, names: dict[str, TypeExpr], fresh: FreshNames) -> Formula:
    """Rewrite ``Y = W`` extensionally for the given higher-order names."""

    def member(t: Term, ps: tuple) -> Formula:
        if isinstance(t, Lit):
            return TRUE if t.kind == "top" else FALSE
        return Apply(t, ps)

    def go(g: Formula) -> Formula:
        if isinstance(g, Equal):
            hit = next((s for s in (g.lhs, g.rhs) if isinstance(s, str) and s in names), None)
            if hit is None:
                return g
            t = names[hit]
            ps = tuple(fresh("p") for _ in t.children)
            a, b = member(g.lhs, ps), member(g.rhs, ps)
            body = disj(And((a, b)), And((neg(a), neg(b))))
            for p, c in reversed(list(zip(ps, t.children))):
                body = Quant(FORALL, p, c, body)
            return body
        return map_subformulas(g, go)

    return go(matrix)


def _skolem(f: Formula, y: str, x: str) -> Formula:
    """``y(Z...)`` becomes ``y(x, Z...)`` everywhere."""
    if isinstance(f, Apply):
        if y in f.args:
            raise NormalizationError(f"{y} is used as an argument; cannot change its type")
        if f.head == y:
            return Apply(y, (x,) + f.args)
        return f
    if isinstance(f, Equal):
        if y in (f.lhs, f.rhs):
            raise NormalizationError(f"{y} occurs in an equality")
        return f
    g = map_subformulas(f, lambda c: _skolem(c, y, x))
    if y in _outer_terms(g):
        raise NormalizationError(f"{y} is used as an operator argument")
    return g


def _inversion(quants: list[Quant]) -> int | None:
    for i in range(len(quants) - 1):
        if quants[i].type.order < quants[i + 1].type.order:
            return i
    return None


def to_dnf(f: Formula, vocabulary: Mapping[str, TypeExpr] | None = None) -> Formula:
    """Reorder a prenex prefix so quantifier orders never increase.

    A lower-order ``Q X`` followed by a higher-order ``Q' Y`` of the other
    kind becomes ``Q' Y' Q X`` with ``Y'`` taking ``X`` as an extra first
    argument; same-kind neighbours are simply swapped.
    """
    f = _distinct(f)
    if not is_prenex(f):
        f = to_pnf(None, f)
    quants, matrix = prefix(f)
    if _inversion(quants) is None:
        return f
    # higher-order equalities on variables that may change type
    movable = {}
    for i, q in enumerate(quants):
        if any(p.type.order < q.type.order for p in quants[:i]):
            movable[q.var] = q.type
    if any(isinstance(g, Equal) and ({g.lhs, g.rhs} & set(movable)) for g in walk(matrix)):
        fresh = FreshNames(all_names(f) | set(vocabulary or {}))
        f = to_pnf(None, _rebuild(quants, _expand_equalities(matrix, movable, fresh)))
        quants, matrix = prefix(f)
    while (i := _inversion(quants)) is not None:
        x, y = quants[i], quants[i + 1]
        if x.kind != y.kind:
            matrix = _skolem(matrix, y.var, x.var)
            y = replace(y, type=TypeExpr((x.type,) + y.type.children))
        quants[i], quants[i + 1] = y, x
    return _rebuild(quants, matrix)


def is_dnf(f: Formula) -> bool:
    if not is_prenex(f):
        return False
    quants, _ = prefix(f)
    return _inversion(quants) is None


def order_counts(f: Formula) -> dict[int, int]:
    """Number of quantifiers of each order in the prefix."""
    quants, _ = prefix(f)
    out: dict[int, int] = {}
    for q in quants:
        out[q.type.order] = out.get(q.type.order, 0) + 1
    return out


# -- checks, lint, reports -------------------------------------------------

def check_operator_nf(f: Formula) -> bool:
    """Every operator is applied to bottom (and top for TC) literals and has an operator-free body."""
    for g in walk(f):
        if not is_operator(g):
            continue
        if any(is_operator(h) for b in subformulas(g) for h in walk(b)):
            return False
        if isinstance(g, TC):
            ok = all(isinstance(z, Lit) and z.kind == "bot" for z in g.zs) and all(
                isinstance(t, Lit) and t.kind == "top" for t in g.ts)
        else:
            ok = all(isinstance(y, Lit) and y.kind == "bot" for y in g.args)
        if not ok:
            return False
    return True


@dataclass(frozen=True)
class MonadicLint:
    monadic: bool
    offending: tuple[tuple[str, TypeExpr], ...] = ()

    def __bool__(self) -> bool:
        return self.monadic


def monadic_lint(f: Formula) -> MonadicLint:
    """Quantified relations must have types in the chain i, (i), ((i)), ..."""
    bad = tuple((g.var, g.type) for g in walk(f) if isinstance(g, Quant) and not is_monadic(g.type))
    return MonadicLint(not bad, bad)


def block_counts(f: Formula) -> dict[int, int]:
    quants, _ = prefix(f)
    orders = sorted({q.type.order for q in quants})
    return {r: count_blocks([q.kind for q in quants if q.type.order == r]) for r in orders}


@dataclass(frozen=True)
class NormalFormReport:
    pnf: bool
    snf: bool
    anf: bool
    dnf: bool
    operator_nf: bool
    blocks_before: dict[int, int] = field(default_factory=dict)
    blocks_after: dict[int, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "pnf": self.pnf,
            "snf": self.snf,
            "anf": self.anf,
            "dnf": self.dnf,
            "operator_nf": self.operator_nf,
            "blocks_before": {str(k): v for k, v in self.blocks_before.items()},
            "blocks_after": {str(k): v for k, v in self.blocks_after.items()},
        }


def report(after: Formula, before: Formula | None = None) -> NormalFormReport:
    return NormalFormReport(
        pnf=is_prenex(after),
        snf=is_snf(after),
        anf=is_anf(after),
        dnf=is_dnf(after),
        operator_nf=check_operator_nf(after),
        blocks_before=block_counts(before if before is not None else after),
        blocks_after=block_counts(after),
    )


STAGES = ("alpha", "pnf", "snf", "anf", "dnf")


def pipeline(f: Formula, vocabulary: Mapping[str, TypeExpr] | None = None) -> dict[str, Formula]:
    """Every stage of alpha -> pnf -> snf -> anf -> pnf -> dnf, keyed by stage name."""
    out = {}
    g = alpha_rename(f)
    out["alpha"] = g
    g = to_pnf(None, g)
    out["pnf"] = g
    g = to_snf(g, vocabulary)
    out["snf"] = g
    g = to_anf(g, vocabulary)
    out["anf"] = g
    g = to_dnf(to_pnf(None, g), vocabulary)
    out["dnf"] = g
    return out


def normalize(f: Formula, form: str, vocabulary: Mapping[str, TypeExpr] | None = None) -> Formula:
    """One normal form: ``pnf``, ``pnf-best``, ``snf``, ``anf``, ``dnf`` or ``full``."""
    if form == "pnf":
        return to_pnf(None, f)
    if form == "pnf-best":
        return best_pnf(None, f)
    if form == "snf":
        return to_snf(f, vocabulary)
    if form == "anf":
        return to_anf(to_snf(f, vocabulary) if not is_snf(f) else f, vocabulary)
    if form == "dnf":
        return to_dnf(f, vocabulary)
    if form == "full":
        return pipeline(f, vocabulary)["dnf"]
    raise ValueError(f"unknown normal form {form!r}")
