"""Relation types: the element type ``i`` and tuples of types."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class TypeExpr:
    """A relation type.

    The element type has no children; a tuple type has at least one.
    """

    children: tuple[TypeExpr, ...] = ()

    @property
    def is_iota(self) -> bool:
        return not self.children

    @property
    def arity(self) -> int:
        return len(self.children)

    @property
    def order(self) -> int:
        return type_order(self)

    def __str__(self) -> str:
        return format_type(self)

    def __repr__(self) -> str:
        return f"TypeExpr({format_type(self)!r})"


IOTA = TypeExpr()


def tuple_type(*children: TypeExpr) -> TypeExpr:
    if not children:
        raise ValueError("a tuple type needs at least one component")
    return TypeExpr(tuple(children))


@lru_cache(maxsize=None)
def type_order(t: TypeExpr) -> int:
    if t.is_iota:
        return 1
    return 1 + max(type_order(c) for c in t.children)


@lru_cache(maxsize=None)
def arity_type(a: int, r: int) -> TypeExpr:
    """The uniform type of arity ``a`` and order ``r``."""
    if a < 1 or r < 1:
        raise ValueError("arity and order must be >= 1")
    if r == 1:
        return IOTA
    sub = arity_type(a, r - 1)
    return TypeExpr((sub,) * a)


def monadic_type(r: int) -> TypeExpr:
    return arity_type(1, r)


def is_arity_type(t: TypeExpr, a: int | None = None) -> bool:
    """True iff ``t`` is ``arity_type(a, order(t))`` (any ``a`` if omitted)."""
    if t.is_iota:
        return True
    if a is None:
        a = t.arity
    return t == arity_type(a, type_order(t))


def is_monadic(t: TypeExpr) -> bool:
    return is_arity_type(t, 1)


def is_step_type(t: TypeExpr) -> bool:
    """Every tuple type of order q has only components of order q - 1."""
    if t.is_iota:
        return True
    q = type_order(t)
    return all(type_order(c) == q - 1 and is_step_type(c) for c in t.children)


def max_tuple_size(t: TypeExpr) -> int:
    if t.is_iota:
        return 1
    return max(t.arity, *(max_tuple_size(c) for c in t.children))


def format_type(t: TypeExpr) -> str:
    if t.is_iota:
        return "i"
    return "(" + ",".join(format_type(c) for c in t.children) + ")"


class TypeSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at offset {pos} in type {text!r}")
        self.text = text
        self.pos = pos


def parse_type(text: str) -> TypeExpr:
    """Parse ``i`` or ``(t,...,t)``; whitespace is ignored."""
    s = "".join(text.split())
    t, pos = _parse_type_at(s, 0)
    if pos != len(s):
        raise TypeSyntaxError(text, pos, "trailing characters")
    return t


def _parse_type_at(s: str, pos: int) -> tuple[TypeExpr, int]:
    if pos >= len(s):
        raise TypeSyntaxError(s, pos, "unexpected end")
    if s[pos] == "i":
        return IOTA, pos + 1
    if s[pos] != "(":
        raise TypeSyntaxError(s, pos, f"unexpected {s[pos]!r}")
    children = []
    pos += 1
    while True:
        child, pos = _parse_type_at(s, pos)
        children.append(child)
        if pos < len(s) and s[pos] == ",":
            pos += 1
            continue
        if pos < len(s) and s[pos] == ")":
            return TypeExpr(tuple(children)), pos + 1
        raise TypeSyntaxError(s, pos, "expected ',' or ')'")
