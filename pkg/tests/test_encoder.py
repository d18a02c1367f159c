import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hoq.encoder import (
    BitCode,
    canonical_compare,
    code_length,
    counts,
    decode,
    domain_size,
    encode,
    enumerate_relations,
    rank,
    texp,
    unrank,
)
from hoq.errors import CodeTooLong, DecodeOutOfRange, SearchSpaceTooLarge
from hoq.limits import Limits
from hoq.types import IOTA, arity_type, parse_type

T = parse_type


def powerset(xs):
    xs = list(xs)
    return [frozenset(c) for k in range(len(xs) + 1) for c in itertools.combinations(xs, k)]


def brute_domain(t, n):
    """Every relation of type t, built from the definition alone."""
    if t.is_iota:
        return list(range(n))
    return powerset(itertools.product(*(brute_domain(c, n) for c in t.children)))


def test_texp():
    assert texp(0, 5, 2) == 5
    assert texp(1, 4, 1) == 16
    assert texp(2, 2, 1) == 16
    assert texp(1, 2, 2) == 16


def test_count_examples():
    assert counts(1, 2, 3).T == 9
    assert counts(2, 1, 2).N == 4
    assert counts(3, 1, 2).N == 16
    assert counts(1, 1, 5).elements and counts(1, 1, 5).N == 5


@given(st.integers(2, 4), st.integers(1, 2), st.integers(1, 3))
def test_count_identities(r, a, n):
    try:
        c = counts(r, a, n, Limits(max_code_bits=2**16))
    except CodeTooLong:
        return
    assert c.N == 2**c.C
    assert c.T == c.N**a
    assert c.B == c.C


def test_count_guard():
    with pytest.raises(CodeTooLong):
        counts(5, 2, 3)


@pytest.mark.parametrize("r,a,n", [(2, 1, 2), (2, 2, 2), (3, 1, 2), (2, 1, 3), (2, 2, 3), (3, 1, 3)])
def test_enumeration_matches_brute_force(r, a, n):
    t = arity_type(a, r)
    got = list(enumerate_relations(t, n))
    assert len(got) == counts(r, a, n).N
    assert set(got) == set(brute_domain(t, n))


def test_iota_enumeration():
    assert list(enumerate_relations(IOTA, 3)) == [0, 1, 2]


def test_monadic_canonical_order():
    got = list(enumerate_relations(T("(i)"), 2))
    assert got == [decode(BitCode(b, T("(i)"), 2)) for b in ("00", "10", "01", "11")]


def test_enumeration_guard():
    with pytest.raises(SearchSpaceTooLarge):
        list(enumerate_relations(T("((i,i))"), 3))


def test_encode_examples():
    t = T("(i)")
    assert encode(frozenset(), t, 2).bits == "00"
    assert encode(frozenset({(0,), (1,)}), t, 2).bits == "11"
    assert encode(2, IOTA, 3).bits == "10"


def test_order_three_singleton():
    t = T("((i))")
    inner = frozenset({(0,)})
    code = encode(frozenset({(inner,)}), t, 2)
    assert len(code.bits) == counts(3, 1, 2).B == 4
    assert code.bits.count("1") == 1
    assert code.bits.index("1") == encode(inner, T("(i)"), 2).value


def test_decode_examples():
    t = T("(i)")
    assert decode(BitCode("00", t, 2)) == frozenset()
    assert decode(BitCode("11", t, 2)) == frozenset({(0,), (1,)})


def test_decode_out_of_range():
    with pytest.raises(DecodeOutOfRange):
        decode(BitCode("11", IOTA, 3))
    with pytest.raises(ValueError):
        decode(BitCode("0", T("(i)"), 2))


def test_mixed_arity_rejected():
    with pytest.raises(TypeError):
        encode(frozenset(), T("((i),i)"), 2)


@pytest.mark.parametrize("r,a,n", [(r, a, n) for r in (1, 2, 3) for a in (1, 2) for n in (1, 2)
                                   if not (r == 3 and a == 2)])
def test_round_trip_grid(r, a, n):
    t = arity_type(a, r)
    for v in enumerate_relations(t, n):
        code = encode(v, t, n)
        assert decode(code) == v
        assert len(code.bits) == (counts(r, a, n).B if r > 1 else code_length(IOTA, n))


def test_encode_decode_codes():
    t = T("((i))")
    for bits in itertools.product("01", repeat=4):
        code = BitCode("".join(bits), t, 2)
        assert encode(decode(code), t, 2) == code


def test_canonical_compare_examples():
    t = T("(i)")
    full = frozenset({(0,), (1,)})
    assert canonical_compare(full, full, t, 2) == 0
    assert canonical_compare(frozenset(), full, t, 2) == -1


def test_canonical_total_order():
    t = T("((i))")
    rels = list(enumerate_relations(t, 2))
    for x, y in itertools.product(rels, rels):
        c = canonical_compare(x, y, t, 2)
        assert c == -canonical_compare(y, x, t, 2)
        assert (c == 0) == (x == y)
    for x, y, z in itertools.product(rels, repeat=3):
        if canonical_compare(x, y, t, 2) < 0 and canonical_compare(y, z, t, 2) < 0:
            assert canonical_compare(x, z, t, 2) < 0


@pytest.mark.parametrize("t", ["(i)", "((i))", "(i,i)", "((i),i)"])
def test_enumeration_strictly_increasing(t):
    t = T(t)
    rels = list(enumerate_relations(t, 2))
    assert len(rels) == domain_size(t, 2)
    assert all(canonical_compare(x, y, t, 2) < 0 for x, y in zip(rels, rels[1:]))


@given(st.integers(0, 15), st.integers(0, 15))
def test_value_bridge(u, v):
    t = T("((i))")
    x, y = unrank(u, t, 2), unrank(v, t, 2)
    assert encode(x, t, 2).value == rank(x, t, 2) == u
    assert canonical_compare(x, y, t, 2) == (u > v) - (u < v)
