"""Generators for reusable formulas: cardinality, order constants, and the
arithmetic predicates on relations read as binary numbers.

A relation ``X`` of type ``A(a, r)`` is read as the number whose bit at
position ``P1..Pa`` (an ``a``-tuple of type ``A(a, r-1)``) is ``X(P1..Pa)``;
tuples are ordered lexicographically with the first component most
significant and elements are ordered by the vocabulary symbol ``lt``.  Under
the natural order on elements this is exactly the encoder's rank.

Operands of the arithmetic builders are variable names or one of the
constants :data:`ONE` and :data:`TOP` (the number 1 and ``p - 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

from .syntax import (
    EXISTS,
    FALSE,
    FORALL,
    TRUE,
    And,
    Apply,
    Equal,
    Formula,
    Not,
    Or,
    Quant,
    Truth,
    conj,
    disj,
)
from .types import IOTA, TypeExpr, arity_type, tuple_type

ORDER_SYMBOL = "lt"
ORDER_TYPE = tuple_type(IOTA, IOTA)


class FreshNames:
    """Deterministic fresh names ``_<base><k>`` avoiding a set of used names."""

    def __init__(self, used: Iterable[str] = ()):
        self.used = set(used)
        self.counters: dict[str, int] = {}

    def __call__(self, base: str = "v") -> str:
        k = self.counters.get(base, 0)
        while True:
            k += 1
            name = f"_{base}{k}"
            if name not in self.used:
                break
        self.counters[base] = k
        self.used.add(name)
        return name


class _Const:
    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


ONE = _Const("ONE")
TOP = _Const("TOP")
Operand = Union[str, _Const]


@dataclass(frozen=True)
class Predicate:
    """A generated formula together with the types of its free symbols."""

    name: str
    formula: Formula
    free: dict[str, TypeExpr] = field(default_factory=dict)

    @property
    def vocabulary(self) -> dict[str, TypeExpr]:
        return dict(self.free)


# -- small helpers ---------------------------------------------------------

def _iff(a: Formula, b: Formula) -> Formula:
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    if a == FALSE:
        return _not(b)
    if b == FALSE:
        return _not(a)
    return Or((And((a, b)), And((_not(a), _not(b)))))


def _not(a: Formula) -> Formula:
    if isinstance(a, Not):
        return a.child
    if isinstance(a, Truth):
        return Truth(not a.value)
    return Not(a)


def _xor(a: Formula, b: Formula) -> Formula:
    # A (+) B is A <=> not B
    return _iff(a, _not(b))


def _implies(a: Formula, b: Formula) -> Formula:
    return disj(_not(a), b)


def _ite(c: Formula, a: Formula, b: Formula) -> Formula:
    if c == TRUE:
        return a
    if c == FALSE:
        return b
    return Or((And((c, a)), And((Not(c), b))))


def _quant(kind: str, names: list[str], types: list[TypeExpr], body: Formula) -> Formula:
    for n, t in reversed(list(zip(names, types))):
        body = Quant(kind, n, t, body)
    return body


def _fresh_tuple(fresh: FreshNames, base: str, k: int) -> list[str]:
    return [fresh(base) for _ in range(k)]


def is_min(x: str, t: TypeExpr, fresh: FreshNames) -> Formula:
    """``x`` has rank 0 in its type."""
    if t.is_iota:
        y = fresh("y")
        return Not(Quant(EXISTS, y, IOTA, Apply(ORDER_SYMBOL, (y, x))))
    qs = _fresh_tuple(fresh, "q", t.arity)
    return Not(_quant(EXISTS, qs, list(t.children), Apply(x, tuple(qs))))


def member(op: Operand, args: list[str], types: list[TypeExpr], fresh: FreshNames) -> Formula:
    if op is TOP:
        return TRUE
    if op is ONE:
        return conj(*(is_min(x, t, fresh) for x, t in zip(args, types)))
    return Apply(op, tuple(args))


# -- equality and order ----------------------------------------------------

def eq_rel(x: str, y: str, t: TypeExpr, fresh: FreshNames) -> Formula:
    """Extensional equality unrolled down to element equality."""
    if t.is_iota:
        return Equal(x, y, IOTA)
    ps = _fresh_tuple(fresh, "p", t.arity)
    return _quant(FORALL, ps, list(t.children), _iff(Apply(x, tuple(ps)), Apply(y, tuple(ps))))


def eq_tuple(xs, ys, types, fresh: FreshNames) -> Formula:
    return conj(*(eq_rel(x, y, t, fresh) for x, y, t in zip(xs, ys, types)))


def lt_rel(x: str, y: str, t: TypeExpr, fresh: FreshNames) -> Formula:
    """``x`` is below ``y`` as binary numbers (``lt`` on elements)."""
    if t.is_iota:
        return Apply(ORDER_SYMBOL, (x, y))
    types = list(t.children)
    ps = _fresh_tuple(fresh, "p", t.arity)
    qs = _fresh_tuple(fresh, "q", t.arity)
    above = _implies(
        lt_tuple(ps, qs, types, fresh),
        _iff(Apply(y, tuple(qs)), Apply(x, tuple(qs))),
    )
    body = conj(Apply(y, tuple(ps)), Not(Apply(x, tuple(ps))), _quant(FORALL, qs, types, above))
    return _quant(EXISTS, ps, types, body)


def lt_tuple(xs, ys, types, fresh: FreshNames) -> Formula:
    """Lexicographic order, first component most significant."""
    cases = []
    for i in range(len(xs)):
        same = [eq_rel(xs[j], ys[j], types[j], fresh) for j in range(i)]
        cases.append(conj(lt_rel(xs[i], ys[i], types[i], fresh), *same))
    return disj(*cases)


# -- addition --------------------------------------------------------------

def _positions(a: int, r: int) -> list[TypeExpr]:
    return [arity_type(a, r - 1)] * a


def carry(x: Operand, y: Operand, idx: list[str], a: int, r: int, fresh: FreshNames) -> Formula:
    """A carry enters position ``idx`` when adding ``x`` and ``y``."""
    types = _positions(a, r)
    ts = _fresh_tuple(fresh, "t", a)
    us = _fresh_tuple(fresh, "u", a)
    between = conj(lt_tuple(ts, us, types, fresh), lt_tuple(us, idx, types, fresh))
    propagate = _quant(
        FORALL, us, types,
        _implies(between, disj(member(x, us, types, fresh), member(y, us, types, fresh))),
    )
    body = conj(
        lt_tuple(ts, idx, types, fresh),
        member(x, ts, types, fresh),
        member(y, ts, types, fresh),
        propagate,
    )
    return _quant(EXISTS, ts, types, body)


def carry_out(x: Operand, y: Operand, a: int, r: int, fresh: FreshNames) -> Formula:
    """A carry leaves the most significant position."""
    types = _positions(a, r)
    ts = _fresh_tuple(fresh, "t", a)
    us = _fresh_tuple(fresh, "u", a)
    propagate = _quant(
        FORALL, us, types,
        _implies(lt_tuple(ts, us, types, fresh),
                 disj(member(x, us, types, fresh), member(y, us, types, fresh))),
    )
    body = conj(member(x, ts, types, fresh), member(y, ts, types, fresh), propagate)
    return _quant(EXISTS, ts, types, body)


def plus(x: Operand, y: Operand, z: Operand, a: int, r: int, fresh: FreshNames) -> Formula:
    """``x + y = z`` without wrap-around."""
    types = _positions(a, r)
    idx = _fresh_tuple(fresh, "i", a)
    bit = _xor(
        _xor(member(x, idx, types, fresh), member(y, idx, types, fresh)),
        carry(x, y, idx, a, r, fresh),
    )
    digits = _quant(FORALL, idx, types, _iff(member(z, idx, types, fresh), bit))
    return conj(digits, Not(carry_out(x, y, a, r, fresh)))


def overflow(x: Operand, y: Operand, a: int, r: int, fresh: FreshNames) -> Formula:
    z = fresh("z")
    return Not(Quant(EXISTS, z, arity_type(a, r), plus(x, y, z, a, r, fresh)))


def plus_mod(x: Operand, y: Operand, z: Operand, a: int, r: int, fresh: FreshNames) -> Formula:
    """``x + y = z`` modulo ``p = 2**B``, via the witness chain d, e, f, g."""
    t = arity_type(a, r)
    d, e, f, g = fresh("d"), fresh("e"), fresh("f"), fresh("g")
    chain = conj(plus(e, f, g, a, r, fresh), plus(z, g, TOP, a, r, fresh))
    chain = conj(plus(f, y, TOP, a, r, fresh), Quant(EXISTS, g, t, chain))
    chain = conj(plus(d, ONE, e, a, r, fresh), Quant(EXISTS, f, t, chain))
    chain = conj(plus(d, x, TOP, a, r, fresh), Quant(EXISTS, e, t, chain))
    return disj(plus(x, y, z, a, r, fresh), Quant(EXISTS, d, t, chain))


def plus_tuple(xs, ys, zs, a: int, r: int, fresh: FreshNames) -> Formula:
    """Base-``p`` addition of ``a``-digit numbers, digit 1 least significant, mod ``p**a``."""
    t = arity_type(a, r)
    parts = []
    for i in range(len(xs)):
        incoming = []
        for j in range(i):
            chain = [plus_mod(xs[k], ys[k], TOP, a, r, fresh) for k in range(j + 1, i)]
            incoming.append(conj(overflow(xs[j], ys[j], a, r, fresh), *chain))
        tmp = fresh("w")
        bumped = Quant(
            EXISTS, tmp, t,
            conj(plus_mod(xs[i], ys[i], tmp, a, r, fresh), plus_mod(tmp, ONE, zs[i], a, r, fresh)),
        )
        parts.append(_ite(disj(*incoming), bumped, plus_mod(xs[i], ys[i], zs[i], a, r, fresh)))
    return conj(*parts)


# -- cardinality and constants --------------------------------------------

def card_formula(op: str, k: int, target: str, t: TypeExpr, fresh: FreshNames) -> Formula:
    """``card<=k``, ``card>=k`` or ``card=k`` of relation ``target`` of type ``t``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if t.is_iota:
        raise TypeError("card needs a relation type")
    if op == "<=":
        return _card_le(k, target, t, fresh)
    if op == ">=":
        return _card_ge(k, target, t, fresh)
    if op == "=":
        return conj(_card_ge(k, target, t, fresh), _card_le(k, target, t, fresh))
    raise ValueError(f"unknown cardinality comparison {op!r}")


def _same_tuple(us, vs, types) -> Formula:
    return conj(*(Equal(u, v, ct) for u, v, ct in zip(us, vs, types)))


def _card_le(k, target, t, fresh) -> Formula:
    types = list(t.children)
    rows = [_fresh_tuple(fresh, "u", t.arity) for _ in range(k + 1)]
    members = conj(*(Apply(target, tuple(row)) for row in rows))
    clash = disj(*(
        _same_tuple(rows[i], rows[j], types)
        for i in range(k + 1) for j in range(i + 1, k + 1)
    ))
    names = [u for row in rows for u in row]
    return _quant(FORALL, names, types * (k + 1), _implies(members, clash))


def _card_ge(k, target, t, fresh) -> Formula:
    if k == 0:
        return TRUE
    types = list(t.children)
    rows = [_fresh_tuple(fresh, "u", t.arity) for _ in range(k)]
    members = [Apply(target, tuple(row)) for row in rows]
    distinct = [
        Not(_same_tuple(rows[i], rows[j], types))
        for i in range(k) for j in range(i + 1, k)
    ]
    names = [u for row in rows for u in row]
    return _quant(EXISTS, names, types * k, conj(*members, *distinct))


def const_formula(which: str, x: str, fresh: FreshNames) -> Formula:
    """``0(x)``, ``1(x)`` or ``max(x)`` over the order ``lt``."""
    if which == "0":
        y = fresh("y")
        return Not(Quant(EXISTS, y, IOTA, Apply(ORDER_SYMBOL, (y, x))))
    if which == "max":
        y = fresh("y")
        return Not(Quant(EXISTS, y, IOTA, Apply(ORDER_SYMBOL, (x, y))))
    if which == "1":
        # exactly one y with y < x
        y0, y1, y2 = fresh("y"), fresh("y"), fresh("y")
        some = Quant(EXISTS, y0, IOTA, Apply(ORDER_SYMBOL, (y0, x)))
        both = conj(Apply(ORDER_SYMBOL, (y1, x)), Apply(ORDER_SYMBOL, (y2, x)))
        unique = _quant(FORALL, [y1, y2], [IOTA, IOTA], _implies(both, Equal(y1, y2, IOTA)))
        return conj(some, unique)
    raise ValueError(f"unknown constant {which!r}")


# -- public generators -----------------------------------------------------

def _check(a: int, r: int, min_r: int = 2) -> None:
    if a < 1:
        raise ValueError("arity must be >= 1")
    if r < min_r:
        raise ValueError(f"order must be >= {min_r}")


def _vocab(**free: TypeExpr) -> dict[str, TypeExpr]:
    return {ORDER_SYMBOL: ORDER_TYPE, **free}


def gen_card(op: str, k: int, t: TypeExpr, var: str = "X") -> Predicate:
    fresh = FreshNames({var})
    return Predicate(f"card{op}{k}", card_formula(op, k, var, t, fresh), {var: t})


def gen_const(which: str, var: str = "x") -> Predicate:
    fresh = FreshNames({var, ORDER_SYMBOL})
    return Predicate(which, const_formula(which, var, fresh), _vocab(**{var: IOTA}))


def gen_eq(a: int, r: int) -> Predicate:
    _check(a, r)
    t = arity_type(a, r)
    return Predicate("eq", eq_rel("X", "Y", t, FreshNames({"X", "Y"})), {"X": t, "Y": t})


def gen_lt(a: int, r: int) -> Predicate:
    _check(a, r, 1)
    t = arity_type(a, r)
    f = lt_rel("X", "Y", t, FreshNames({"X", "Y", ORDER_SYMBOL}))
    return Predicate("lt", f, _vocab(X=t, Y=t))


def _names(base: str, a: int) -> list[str]:
    return [f"{base}{i}" for i in range(1, a + 1)]


def gen_lt_tuple(a: int, r: int) -> Predicate:
    _check(a, r, 1)
    t = arity_type(a, r)
    xs, ys = _names("X", a), _names("Y", a)
    f = lt_tuple(xs, ys, [t] * a, FreshNames(xs + ys + [ORDER_SYMBOL]))
    return Predicate("lt_tuple", f, _vocab(**{n: t for n in xs + ys}))


def gen_bit(a: int, r: int) -> Predicate:
    _check(a, r)
    t = arity_type(a, r)
    ss = _names("S", a)
    free = {"R": t, **{s: arity_type(a, r - 1) for s in ss}}
    return Predicate("bit", Apply("R", tuple(ss)), free)


def _arith(name: str, build: Callable, names: tuple[str, ...], a: int, r: int) -> Predicate:
    _check(a, r)
    t = arity_type(a, r)
    fresh = FreshNames(set(names) | {ORDER_SYMBOL})
    return Predicate(name, build(*names, a, r, fresh), _vocab(**{n: t for n in names}))


def gen_plus(a: int, r: int) -> Predicate:
    return _arith("plus", plus, ("X", "Y", "Z"), a, r)


def gen_overflow(a: int, r: int) -> Predicate:
    return _arith("overflow", overflow, ("X", "Y"), a, r)


def gen_plus_mod(a: int, r: int) -> Predicate:
    return _arith("plus_mod", plus_mod, ("X", "Y", "Z"), a, r)


def gen_plus_tuple(a: int, r: int) -> Predicate:
    _check(a, r)
    t = arity_type(a, r)
    xs, ys, zs = _names("X", a), _names("Y", a), _names("Z", a)
    fresh = FreshNames(xs + ys + zs + [ORDER_SYMBOL])
    f = plus_tuple(xs, ys, zs, a, r, fresh)
    return Predicate("plus_tuple", f, _vocab(**{n: t for n in xs + ys + zs}))


GENERATORS = {
    "eq": gen_eq,
    "lt": gen_lt,
    "lt_tuple": gen_lt_tuple,
    "bit": gen_bit,
    "plus": gen_plus,
    "overflow": gen_overflow,
    "plus_mod": gen_plus_mod,
    "plus_tuple": gen_plus_tuple,
}
