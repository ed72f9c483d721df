from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syzbundle.errors import (
    InternalConsistencyError,
    InvalidChernPolynomial,
    StructuralError,
    UnsupportedDegree,
)
from syzbundle.ring import (
    Ambient,
    ChernPolynomial,
    GradedClass,
    chern_character,
    chern_from_character,
    chern_invert,
    chern_of_twist,
    class_mul,
    custom_ring,
    euler_char_hrr,
    euler_char_of_character,
    from_coefficients,
    hyperplane_class,
    one,
    projective_ambient,
    projective_ring,
    todd_class,
)

from strategies import chern_polys, poly, small


def coeffs(g: GradedClass):
    return [g.coeff(k) for k in range(g.ring.dim + 1)]


# -- class_mul


def test_generator_product():
    R = projective_ring(2)
    h = hyperplane_class(R)
    assert coeffs(class_mul(h, h)) == [0, 0, 1]


def test_square_of_minus_two_h():
    R = projective_ring(2)
    x = from_coefficients(R, [1, -2])
    assert str(class_mul(x, x)) == "1 - 4h + 4h^2"


def test_truncation():
    R = projective_ring(2)
    h = hyperplane_class(R)
    assert class_mul(h * h, h) == from_coefficients(R, [0])


def test_mismatched_rings():
    with pytest.raises(StructuralError):
        class_mul(one(projective_ring(2)), one(projective_ring(3)))


# -- inversion


@pytest.mark.parametrize(
    "n, c, expected",
    [
        (2, [1, 3], "1 - 3h + 9h^2"),
        (2, [1, 4, 12], "1 - 4h + 4h^2"),
        (2, [1], "1"),
        (3, [1, 1], "1 - h + h^2 - h^3"),
    ],
)
def test_chern_invert_examples(n, c, expected):
    assert str(chern_invert(poly(n, c))) == expected


def test_invert_rank_is_supplied():
    assert chern_invert(poly(2, [1, 3], 1), 2).rank == 2


def test_non_unit_rejected():
    R = projective_ring(2)
    with pytest.raises(InvalidChernPolynomial):
        ChernPolynomial(from_coefficients(R, [2, 1]))
    with pytest.raises(InvalidChernPolynomial):
        ChernPolynomial(from_coefficients(R, [0, 1]))


def test_classes_beyond_dimension_must_vanish():
    R = projective_ring(2)
    with pytest.raises(InvalidChernPolynomial):
        ChernPolynomial.from_classes(R, [1, 2, 3], 3)
    assert ChernPolynomial.from_classes(R, [1, 2, 0], 3).classes() == [1, 2]


# -- twisting


def test_twist_back_to_trivial():
    R = projective_ring(2)
    assert str(chern_of_twist(poly(2, [1, -2], 1), hyperplane_class(R) * 2)) == "1"


@pytest.mark.parametrize("N", [-4, -1, 0, 2, 7])
def test_twist_line_bundle(N):
    R = projective_ring(3)
    got = chern_of_twist(poly(3, [1, 3], 1), hyperplane_class(R) * N)
    assert coeffs(got.total) == [1, 3 + N, 0, 0]


def test_twist_rank_two():
    R = projective_ring(2)
    assert str(chern_of_twist(poly(2, [1, -3, 9], 2), hyperplane_class(R))) == "1 - h + 7h^2"


def test_twist_needs_degree_one_class():
    R = projective_ring(2)
    with pytest.raises(StructuralError):
        chern_of_twist(poly(2, [1, 1], 1), one(R))


def test_twist_matches_character_product():
    R = projective_ring(3)
    c = poly(3, [1, 2, -5, 7], 3)
    l = hyperplane_class(R) * -2
    via_ch = chern_from_character(chern_character(c) * chern_character(ChernPolynomial(one(R) + l, 1)))
    assert chern_of_twist(c, l) == via_ch


# -- Chern character and Todd


def test_character_of_line():
    R = projective_ring(3)
    ch = chern_character(poly(3, [1, 5], 1))
    assert coeffs(ch) == [1, 5, Fraction(25, 2), Fraction(125, 6)]


def test_character_examples():
    assert str(chern_character(poly(2, [1, -3, 9], 2))) == "2 - 3h - (9/2)h^2"
    assert str(chern_character(poly(2, [1, 0, 27], 4))) == "4 - 27h^2"


def test_character_needs_rank():
    with pytest.raises(InvalidChernPolynomial):
        chern_character(poly(2, [1, 1]))


@pytest.mark.parametrize(
    "n, expected",
    [(1, "1 + h"), (2, "1 + (3/2)h + h^2"), (3, "1 + 2h + (11/6)h^2 + h^3")],
)
def test_todd(n, expected):
    assert str(todd_class(projective_ambient(n))) == expected


def test_todd_unsupported_beyond_three():
    with pytest.raises(UnsupportedDegree):
        todd_class(projective_ambient(4))


def test_todd_needs_ring_data():
    class Bare:
        ring = None
        tangent = None

    with pytest.raises(UnsupportedDegree):
        todd_class(Bare())


def test_hrr_examples():
    P2 = projective_ambient(2)
    assert euler_char_hrr(poly(2, [1], 1), P2) == 1
    assert euler_char_hrr(poly(2, [1, 3], 1), P2) == 10
    assert euler_char_hrr(poly(2, [1, 0, 27], 4), P2) == -23


def test_hrr_refuses_to_round():
    R = projective_ring(2)
    with pytest.raises(InternalConsistencyError):
        euler_char_of_character(from_coefficients(R, [0, 0, Fraction(1, 2)]), projective_ambient(2))


@pytest.mark.parametrize("n", [2, 3])
def test_hrr_matches_binomial(n):
    for d in range(-(n + 2), n + 3):
        expected = comb(n + d, n) if d >= 0 else (-1) ** n * comb(-d - 1, n)
        assert euler_char_hrr(poly(n, [1, d], 1), projective_ambient(n)) == expected


# -- custom rings


def quadric_ring():
    # P^1 x P^1: a, b in degree 1 with a^2 = b^2 = 0, ab = point
    return custom_ring([1, 2, 1], {(1, 0, 1, 1): [1]}, [1], hyperplane=[1, 1])


def test_custom_ring_products():
    R = quadric_ring()
    H = hyperplane_class(R)
    assert (H * H).degree() == 2


def test_custom_ring_hrr():
    R = quadric_ring()
    tangent = ChernPolynomial(one(R) + hyperplane_class(R) * 2, 2)
    # c(T) = (1 + 2a)(1 + 2b) = 1 + 2(a + b) + 4ab
    ab = GradedClass(R, ((Fraction(0),), (Fraction(0), Fraction(0)), (Fraction(4),)))
    tangent = ChernPolynomial(tangent.total + ab, 2)
    X = Ambient(R, tangent)
    O = ChernPolynomial(one(R), 1)
    assert euler_char_hrr(O, X) == 1
    # O(1,1) has 4 sections
    assert euler_char_hrr(ChernPolynomial(one(R) + hyperplane_class(R), 1), X) == 4


def test_custom_ring_rejects_non_associative():
    # degree 1 spanned by a, b with ab = c and ac = t: (aa)b = 0 but a(ab) = t
    with pytest.raises(StructuralError, match="associative"):
        custom_ring([1, 2, 1, 1], {(1, 0, 1, 1): [1], (1, 0, 2, 0): [1]}, [1])


def test_custom_ring_shape_check():
    with pytest.raises(StructuralError):
        custom_ring([1, 2, 1], {(1, 0, 1, 5): [1]}, [1])


def test_no_floats_accepted():
    with pytest.raises(TypeError):
        from_coefficients(projective_ring(2), [1, 0.5])


# -- properties (the inversion round trip runs in the acceptance suite)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.data())
def test_character_additive(n, data):
    a = poly(n, [1] + data.draw(st.lists(small, min_size=n, max_size=n)), data.draw(st.integers(0, 5)))
    b = poly(n, [1] + data.draw(st.lists(small, min_size=n, max_size=n)), data.draw(st.integers(0, 5)))
    assert chern_character(a * b) == chern_character(a) + chern_character(b)


@settings(max_examples=60, deadline=None)
@given(chern_polys(), small)
def test_twist_inverse(c, m):
    l = hyperplane_class(c.ring) * m
    assert chern_of_twist(chern_of_twist(c, l), -l) == c


@settings(max_examples=80, deadline=None)
@given(chern_polys())
def test_character_round_trip(c):
    assert chern_from_character(chern_character(c)) == c


@settings(max_examples=40, deadline=None)
@given(chern_polys(max_n=3))
def test_dual_twice(c):
    assert c.dual().dual() == c
