"""Formula abstract syntax.

Formulas are immutable trees of frozen dataclasses, so structural
equality is ``==``.  Arguments of atoms are *terms*: a variable name
(``str``) or a :class:`Lit` standing for the empty/full relation of a type.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterator, Union

from .types import TypeExpr

EXISTS = "exists"
FORALL = "forall"

FIX_KINDS = ("PFP", "IFP")
NFIX_KINDS = ("NPFP", "NIFP")
AFIX_KINDS = ("APFP", "AIFP")


@dataclass(frozen=True)
class Lit:
    """``bot:t`` / ``top:t``; on ``i`` these are the least/greatest element."""

    kind: str  # "bot" | "top"
    type: TypeExpr


Term = Union[str, Lit]


@dataclass(frozen=True)
class Binder:
    name: str
    type: TypeExpr


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


@dataclass(frozen=True)
class Apply(Formula):
    head: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Equal(Formula):
    lhs: Term
    rhs: Term
    type: TypeExpr | None = None


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Quant(Formula):
    kind: str
    var: str
    type: TypeExpr
    body: Formula


@dataclass(frozen=True)
class TC(Formula):
    xs: tuple[Binder, ...]
    ys: tuple[Binder, ...]
    body: Formula
    zs: tuple[Term, ...]
    ts: tuple[Term, ...]


@dataclass(frozen=True)
class Fix(Formula):
    kind: str
    pred: str
    xs: tuple[Binder, ...]
    body: Formula
    args: tuple[Term, ...]


@dataclass(frozen=True)
class NFix(Formula):
    kind: str
    pred: str
    xs: tuple[Binder, ...]
    body0: Formula
    body1: Formula
    args: tuple[Term, ...]


@dataclass(frozen=True)
class AFix(Formula):
    kind: str
    pred: str
    xs: tuple[Binder, ...]
    body0: Formula
    body1: Formula
    args: tuple[Term, ...]


OPERATORS = (TC, Fix, NFix, AFix)
TRUE = Truth(True)
FALSE = Truth(False)


def dual(kind: str) -> str:
    return FORALL if kind == EXISTS else EXISTS


def pred_type(xs: tuple[Binder, ...]) -> TypeExpr:
    return TypeExpr(tuple(b.type for b in xs))


# -- builders -------------------------------------------------------------

def conj(*fs: Formula) -> Formula:
    parts: list[Formula] = []
    for f in fs:
        if isinstance(f, And):
            parts.extend(f.children)
        elif f == TRUE:
            continue
        else:
            parts.append(f)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def disj(*fs: Formula) -> Formula:
    parts: list[Formula] = []
    for f in fs:
        if isinstance(f, Or):
            parts.extend(f.children)
        elif f == FALSE:
            continue
        else:
            parts.append(f)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(tuple(parts))


def neg(f: Formula) -> Formula:
    if isinstance(f, Not):
        return f.child
    if isinstance(f, Truth):
        return Truth(not f.value)
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def iff(a: Formula, b: Formula) -> Formula:
    return Or((And((a, b)), And((Not(a), Not(b)))))


def xor(a: Formula, b: Formula) -> Formula:
    return Or((And((a, Not(b))), And((Not(a), b))))


def exists(binders, body: Formula) -> Formula:
    for name, t in reversed(list(binders)):
        body = Quant(EXISTS, name, t, body)
    return body


def forall(binders, body: Formula) -> Formula:
    for name, t in reversed(list(binders)):
        body = Quant(FORALL, name, t, body)
    return body


def ite(c: Formula, a: Formula, b: Formula) -> Formula:
    return Or((And((c, a)), And((Not(c), b))))


# -- traversal ------------------------------------------------------------

def subformulas(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.child,)
    if isinstance(f, (And, Or)):
        return f.children
    if isinstance(f, (Quant, TC, Fix)):
        return (f.body,)
    if isinstance(f, (NFix, AFix)):
        return (f.body0, f.body1)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order iteration over all subformulas, ``f`` included."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(subformulas(g)))


def map_subformulas(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild ``f`` with ``fn`` applied to each immediate subformula."""
    if isinstance(f, Not):
        return Not(fn(f.child))
    if isinstance(f, And):
        return And(tuple(fn(c) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(fn(c) for c in f.children))
    if isinstance(f, (Quant, TC, Fix)):
        return replace(f, body=fn(f.body))
    if isinstance(f, (NFix, AFix)):
        return replace(f, body0=fn(f.body0), body1=fn(f.body1))
    return f


def term_vars(terms) -> set[str]:
    return {t for t in terms if isinstance(t, str)}


def local_binders(f: Formula) -> tuple[str, ...]:
    """Names bound by ``f`` itself inside its bodies."""
    if isinstance(f, Quant):
        return (f.var,)
    if isinstance(f, TC):
        return tuple(b.name for b in f.xs + f.ys)
    if isinstance(f, (Fix, NFix, AFix)):
        return (f.pred,) + tuple(b.name for b in f.xs)
    return ()


def outer_terms(f: Formula) -> tuple[Term, ...]:
    """Terms of ``f`` evaluated in the enclosing scope."""
    if isinstance(f, Apply):
        return (f.head,) + f.args
    if isinstance(f, Equal):
        return (f.lhs, f.rhs)
    if isinstance(f, TC):
        return f.zs + f.ts
    if isinstance(f, (Fix, NFix, AFix)):
        return f.args
    return ()


def free_vars(f: Formula) -> frozenset[str]:
    out = set(term_vars(outer_terms(f)))
    inner: set[str] = set()
    for g in subformulas(f):
        inner |= free_vars(g)
    out |= inner - set(local_binders(f))
    return frozenset(out)


def all_names(f: Formula) -> set[str]:
    names: set[str] = set()
    for g in walk(f):
        names |= term_vars(outer_terms(g))
        names |= set(local_binders(g))
    return names


def is_operator(f: Formula) -> bool:
    return isinstance(f, OPERATORS)


def rename_free(f: Formula, mapping: dict[str, Term]) -> Formula:
    """Substitute terms for free variables.

    Assumes no capture, i.e. bound names are disjoint from the names
    introduced by ``mapping`` (true after alpha renaming).
    """
    if not mapping:
        return f

    def sub(t: Term) -> Term:
        return mapping.get(t, t) if isinstance(t, str) else t

    if isinstance(f, Apply):
        head = sub(f.head)
        if not isinstance(head, str):
            raise ValueError("cannot substitute a literal into atom head position")
        return Apply(head, tuple(sub(a) for a in f.args))
    if isinstance(f, Equal):
        return replace(f, lhs=sub(f.lhs), rhs=sub(f.rhs))
    inner = {k: v for k, v in mapping.items() if k not in local_binders(f)}
    g = map_subformulas(f, lambda c: rename_free(c, inner))
    if isinstance(g, TC):
        g = replace(g, zs=tuple(sub(t) for t in g.zs), ts=tuple(sub(t) for t in g.ts))
    elif isinstance(g, (Fix, NFix, AFix)):
        g = replace(g, args=tuple(sub(t) for t in g.args))
    return g


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))
