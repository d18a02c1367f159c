import pytest
from hypothesis import given

from hoq.types import (
    IOTA,
    TypeExpr,
    TypeSyntaxError,
    arity_type,
    format_type,
    is_arity_type,
    is_monadic,
    is_step_type,
    max_tuple_size,
    monadic_type,
    parse_type,
    tuple_type,
    type_order,
)

from strategies import types


def order_by_hand(t):
    if t.is_iota:
        return 1
    return 1 + max(order_by_hand(c) for c in t.children)


def test_orders():
    assert type_order(IOTA) == 1
    assert type_order(parse_type("(i,i)")) == 2
    assert type_order(parse_type("(i,((i),i),i)")) == 4


def test_arity_and_monadic_families():
    assert arity_type(2, 3) == parse_type("((i,i),(i,i))")
    assert monadic_type(3) == parse_type("((i))")
    assert is_arity_type(parse_type("((i,i),(i,i))"), 2)
    assert not is_arity_type(parse_type("((i),i)"))
    assert is_monadic(parse_type("(((i)))"))
    assert not is_monadic(parse_type("(i,i)"))
    assert is_step_type(parse_type("((i),(i))"))
    assert not is_step_type(parse_type("((i),i)"))
    assert max_tuple_size(parse_type("((i,i,i),i)")) == 3


@pytest.mark.parametrize("bad", ["", "()", "(i,", "x", "(i)(i)", "((i)"])
def test_parse_errors(bad):
    with pytest.raises(TypeSyntaxError):
        parse_type(bad)


def test_tuple_type_needs_children():
    with pytest.raises(ValueError):
        tuple_type()


@given(types)
def test_order_matches_recursion(t):
    assert type_order(t) == order_by_hand(t)


@given(types)
def test_format_parse_round_trip(t):
    assert parse_type(format_type(t)) == t
