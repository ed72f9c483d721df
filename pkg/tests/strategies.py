"""Generators shared by the unit and acceptance suites."""

from __future__ import annotations

from hypothesis import strategies as st

from syzbundle.cohom import CohomologyTable, line_bundle_cohom_pn, table_sum
from syzbundle.ring import ChernPolynomial, from_coefficients, projective_ring

small = st.integers(min_value=-9, max_value=9)


def poly(n, coeffs, rank=None):
    return ChernPolynomial(from_coefficients(projective_ring(n), coeffs), rank)


def chern_polys(max_n=4):
    return st.builds(
        lambda n, cs, rank: poly(n, [1, *cs[:n]], rank),
        st.integers(min_value=1, max_value=max_n),
        st.tuples(*[small] * max_n),
        st.integers(min_value=0, max_value=6),
    )


@st.composite
def split_ses(draw):
    """``0 -> A -> A + C -> C -> 0`` for sums of line bundles on P^2 or P^3."""
    n = draw(st.integers(2, 3))
    degs = st.lists(st.integers(-6, 6), min_size=1, max_size=3)
    a, c = draw(degs), draw(degs)
    A = table_sum([line_bundle_cohom_pn(n, d) for d in a])
    C = table_sum([line_bundle_cohom_pn(n, d) for d in c])
    B = table_sum([line_bundle_cohom_pn(n, d) for d in a + c])
    return n, (A, B, C)


def admits(result: CohomologyTable, truth: CohomologyTable) -> bool:
    return all(r.admits(t.value) for r, t in zip(result.entries, truth.entries))
