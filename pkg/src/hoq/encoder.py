"""Cardinalities of relation spaces and the canonical bit-string code.

Relation values are plain Python objects: an ``int`` for an element and a
``frozenset`` of tuples for a relation.  The code of a relation of type
``(t1,...,ta)`` has one bit per tuple of the product of the component
domains.  A tuple's bit position is the mixed-radix number whose digits are
the ranks of its components, component 0 most significant.  The rank of a
relation is its code read as a binary number with bit ``i`` weighing
``2**i``; the rank of an element is its index.  Ranks define the canonical
order, and for uniform-arity types the tuple position is exactly the
concatenation of the component codes, most significant first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from .errors import CodeTooLong, DecodeOutOfRange, SearchSpaceTooLarge
from .limits import DEFAULT_LIMITS, Limits
from .types import TypeExpr, is_arity_type

Value = Union[int, frozenset]


def texp(k: int, x: int, a: int, max_bits: int | None = None) -> int:
    """Tower ``2**(a * 2**(a * ... x))`` with ``k`` exponentiations."""
    for _ in range(k):
        e = a * x
        if max_bits is not None and e + 1 > max_bits:
            raise CodeTooLong(f"value needs more than {max_bits} bits")
        x = 1 << e
    return x


def itexp(k: int, x: int, base: int = 2) -> int:
    for _ in range(k):
        x = base**x
    return x


@dataclass(frozen=True)
class CountReport:
    r: int
    a: int
    n: int
    C: int | None
    N: int
    T: int
    B: int
    elements: bool = False  # r == 1: N counts elements, C is undefined

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "a": self.a,
            "n": self.n,
            "C": self.C,
            "N": self.N,
            "T": self.T,
            "B": self.B,
            "elements": self.elements,
        }


def element_bits(n: int) -> int:
    return (n - 1).bit_length()


def counts(r: int, a: int, n: int, limits: Limits = DEFAULT_LIMITS) -> CountReport:
    """C, N, T and B for relations of arity ``a`` and order ``r`` over ``n`` elements."""
    if r < 1 or a < 1 or n < 1:
        raise ValueError("r, a and n must be >= 1")
    lim = limits.max_code_bits
    base = n**a
    if base.bit_length() > lim:
        raise CodeTooLong(f"n**a needs more than {lim} bits")
    if r == 1:
        return CountReport(r, a, n, None, n, base, element_bits(n), elements=True)
    c = texp(r - 2, base, a, lim)
    t = texp(r - 1, base, a, lim)
    if c + 1 > lim:
        raise CodeTooLong(f"N({r},{a}) needs more than {lim} bits")
    return CountReport(r, a, n, c, 1 << c, t, c)


# -- domains and ranks ----------------------------------------------------

@lru_cache(maxsize=None)
def domain_size(t: TypeExpr, n: int) -> int:
    """Number of relations of type ``t``; computed without enumerating."""
    if t.is_iota:
        return n
    return 1 << code_length(t, n)


@lru_cache(maxsize=None)
def code_length(t: TypeExpr, n: int) -> int:
    if t.is_iota:
        return element_bits(n)
    length = 1
    for c in t.children:
        length *= domain_size(c, n)
    return length


def check_enumerable(t: TypeExpr, n: int, limits: Limits = DEFAULT_LIMITS) -> int:
    if not t.is_iota:
        # avoid materialising 2**length just to compare it
        length = code_length(t, n)
        if length.bit_length() > 64 or (1 << length) > limits.max_enum:
            raise SearchSpaceTooLarge(
                f"type {t} over {n} elements has 2**{length} relations "
                f"(limit {limits.max_enum})"
            )
        return 1 << length
    return n


@lru_cache(maxsize=256)
def _tuples(t: TypeExpr, n: int) -> tuple[tuple, ...]:
    return tuple(itertools.product(*(domain(c, n) for c in t.children)))


@lru_cache(maxsize=256)
def _positions(t: TypeExpr, n: int) -> dict[tuple, int]:
    return {tup: i for i, tup in enumerate(_tuples(t, n))}


@lru_cache(maxsize=256)
def domain(t: TypeExpr, n: int) -> tuple[Value, ...]:
    """All relations of type ``t`` in canonical order (unguarded; see enumerate_relations)."""
    if t.is_iota:
        return tuple(range(n))
    tuples = _tuples(t, n)
    return tuple(_from_mask(mask, tuples) for mask in range(1 << len(tuples)))


def _from_mask(mask: int, tuples: tuple[tuple, ...]) -> frozenset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(tuples[i])
        mask >>= 1
        i += 1
    return frozenset(out)


def tuple_space(t: TypeExpr, n: int) -> tuple[tuple, ...]:
    """All tuples a relation of type ``t`` may contain, in position order."""
    return _tuples(t, n)


def full_relation(t: TypeExpr, n: int) -> Value:
    if t.is_iota:
        return n - 1
    return frozenset(_tuples(t, n))


def empty_relation(t: TypeExpr) -> Value:
    return 0 if t.is_iota else frozenset()


def enumerate_relations(
    t: TypeExpr, n: int, limits: Limits = DEFAULT_LIMITS
) -> Iterator[Value]:
    """Yield every relation of type ``t`` once, in canonical order."""
    check_enumerable(t, n, limits)
    yield from domain(t, n)


def position(tup: tuple, t: TypeExpr, n: int) -> int:
    p = 0
    for comp, ct in zip(tup, t.children):
        p = p * domain_size(ct, n) + rank(comp, ct, n)
    return p


def unposition(p: int, t: TypeExpr, n: int) -> tuple:
    comps = []
    for ct in reversed(t.children):
        size = domain_size(ct, n)
        p, digit = divmod(p, size)
        comps.append(unrank(digit, ct, n))
    return tuple(reversed(comps))


def rank(value: Value, t: TypeExpr, n: int) -> int:
    """The code of ``value`` read as a number (the element index for ``i``)."""
    if t.is_iota:
        return value
    total = 0
    for tup in value:
        total |= 1 << position(tup, t, n)
    return total


def unrank(v: int, t: TypeExpr, n: int) -> Value:
    if t.is_iota:
        if not 0 <= v < n:
            raise DecodeOutOfRange(f"element code {v} out of range for universe of size {n}")
        return v
    if v < 0 or v.bit_length() > code_length(t, n):
        raise DecodeOutOfRange(f"code {v} too long for type {t}")
    out = []
    p = 0
    while v:
        if v & 1:
            out.append(unposition(p, t, n))
        v >>= 1
        p += 1
    return frozenset(out)


# -- bit codes ------------------------------------------------------------

@dataclass(frozen=True)
class BitCode:
    """A code as an ASCII ``0``/``1`` string, index 0 first.

    Element codes are big-endian; relation codes put the bit of tuple
    position ``i`` at index ``i``.
    """

    bits: str
    type: TypeExpr
    universe_size: int

    @property
    def value(self) -> int:
        if self.type.is_iota:
            return int(self.bits, 2) if self.bits else 0
        return int(self.bits[::-1], 2) if self.bits else 0

    def __str__(self) -> str:
        return self.bits


def _require_codable(t: TypeExpr) -> None:
    if not is_arity_type(t):
        raise TypeError(f"type {t} is not a uniform-arity type; normalise it first")


def encode(value: Value, t: TypeExpr, n: int, limits: Limits = DEFAULT_LIMITS) -> BitCode:
    _require_codable(t)
    length = code_length(t, n)
    if length > limits.max_code_bits:
        raise CodeTooLong(f"code of type {t} has {length} bits")
    v = rank(value, t, n)
    if t.is_iota:
        if not 0 <= value < n:
            raise DecodeOutOfRange(f"element {value} not in universe of size {n}")
        bits = format(v, f"0{length}b") if length else ""
    else:
        bits = format(v, f"0{length}b")[::-1] if length else ""
    return BitCode(bits, t, n)


def decode(code: BitCode) -> Value:
    t, n = code.type, code.universe_size
    _require_codable(t)
    if len(code.bits) != code_length(t, n) or set(code.bits) - {"0", "1"}:
        raise ValueError(f"expected {code_length(t, n)} bits for type {t}")
    return unrank(code.value, t, n)


def canonical_compare(r: Value, s: Value, t: TypeExpr, n: int) -> int:
    """-1, 0 or 1 as the code of ``r`` is below, equal to or above that of ``s``."""
    a, b = rank(r, t, n), rank(s, t, n)
    return (a > b) - (a < b)


def canonical_key(t: TypeExpr, n: int):
    return lambda value: rank(value, t, n)


def check_value(value, t: TypeExpr, n: int) -> Value:
    """Validate a nested Python value against ``t``; returns the canonical value.

    Accepts any iterables for relations and tuples.
    """
    if t.is_iota:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"expected an element of type i, got {value!r}")
        if not 0 <= value < n:
            raise ValueError(f"element {value} outside universe of size {n}")
        return value
    if isinstance(value, (int, str)):
        raise TypeError(f"expected a relation of type {t}, got {value!r}")
    out = set()
    for tup in value:
        if isinstance(tup, (int, str)):
            raise TypeError(f"expected a tuple of arity {t.arity}, got {tup!r}")
        tup = tuple(tup)
        if len(tup) != t.arity:
            raise TypeError(f"expected a tuple of arity {t.arity}, got {tup!r}")
        out.add(tuple(check_value(c, ct, n) for c, ct in zip(tup, t.children)))
    return frozenset(out)


def to_json_value(value: Value, t: TypeExpr, n: int):
    """Nested lists in canonical order."""
    if t.is_iota:
        return value
    ordered = sorted(value, key=lambda tup: position(tup, t, n))
    return [
        [to_json_value(c, ct, n) for c, ct in zip(tup, t.children)] for tup in ordered
    ]
