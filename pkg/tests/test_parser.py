from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syzbundle.errors import ParseError
from syzbundle.expr import (
    DirectSum,
    Dual,
    LineBundle,
    Opaque,
    SyzygyOf,
    Tensor,
    Twist,
    parse_expr,
    split_degrees,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("O", LineBundle(0)),
        ("O(-3)", LineBundle(-3)),
        ("O(+2)", LineBundle(2)),
        ("sum(O(1),3)", DirectSum(((LineBundle(1), 3),))),
        ("sum(O(1), O(2), O)", DirectSum(((LineBundle(1), 1), (LineBundle(2), 1), (LineBundle(0), 1)))),
        ("dual(syz(O(3),3))", Dual(SyzygyOf(LineBundle(3), 3))),
        ("twist(opaque(F),2)", Twist(Opaque("F"), 2)),
        ("tensor(syz(O(3),3), dual(syz(O(3),3)))", Tensor(SyzygyOf(LineBundle(3), 3), Dual(SyzygyOf(LineBundle(3), 3)))),
        ("opaque(my-bundle.v2_x)", Opaque("my-bundle.v2_x")),
    ],
)
def test_parse_examples(text, expected):
    assert parse_expr(text) == expected


def test_normal_form():
    assert str(parse_expr("  sum( O(1) , O )")) == "sum(O(1),O(0))"
    assert str(parse_expr("O")) == "O(0)"


@pytest.mark.parametrize(
    "text, pos, fragment",
    [
        ("O(", 2, "expected 'int'"),
        ("syz(O(3))", 8, "expected ','"),
        ("foo(O)", 0, "unknown constructor"),
        ("O(1) O(2)", 5, "trailing input"),
        ("sum(O,0)", 6, "multiplicity"),
        ("dual(O(1)", 9, "end of input"),
        ("twist(O, x)", 9, "expected 'int'"),
        ("O(1)#", 4, "unexpected character"),
        ("", 0, "empty"),
    ],
)
def test_parse_errors_carry_position(text, pos, fragment):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.pos == pos
    assert fragment in str(info.value)


def test_error_message_points_at_offender():
    with pytest.raises(ParseError) as info:
        parse_expr("syz(O(3))")
    lines = str(info.value).splitlines()
    assert lines[-1].index("^") - 2 == 8


def test_split_degrees():
    assert split_degrees(parse_expr("sum(O(1),2)")) == (1, 1)
    assert split_degrees(parse_expr("dual(twist(sum(O(1),O(-2)),3))")) == (-4, -1)
    assert split_degrees(parse_expr("tensor(sum(O,O(1)),O(2))")) == (2, 3)
    assert split_degrees(parse_expr("syz(O(1),3)")) is None


# -- round trip over the whole grammar

names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_.\-]{0,6}", fullmatch=True).filter(
    lambda s: s not in ("O", "sum", "dual", "twist", "syz", "tensor", "opaque")
)
ints = st.integers(-20, 20)


def exprs():
    leaves = st.one_of(st.builds(LineBundle, ints), st.builds(Opaque, names))

    def grow(inner):
        # multi-term sums carry unit multiplicities; a repeated summand is its own sum
        return st.one_of(
            st.builds(lambda e, m: DirectSum(((e, m),)), inner, st.integers(1, 5)),
            st.lists(inner, min_size=2, max_size=3).map(lambda es: DirectSum(tuple((e, 1) for e in es))),
            st.builds(Dual, inner),
            st.builds(Twist, inner, ints),
            st.builds(SyzygyOf, inner, st.integers(0, 30)),
            st.builds(Tensor, inner, inner),
        )

    return st.recursive(leaves, grow, max_leaves=8)


@settings(max_examples=60, deadline=None)
@given(exprs())
def test_round_trip(e):
    assert parse_expr(str(e)) == e


@settings(max_examples=20, deadline=None)
@given(exprs(), st.sampled_from([" ", "  ", "\t"]))
def test_whitespace_is_insignificant(e, pad):
    text = str(e).replace(",", f"{pad},{pad}").replace("(", f"({pad}")
    assert parse_expr(pad + text + pad) == e
