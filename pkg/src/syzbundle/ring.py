"""Truncated graded intersection rings and the Chern class calculus on them.

A :class:`RingSpec` is a graded ring ``A = A_0 + ... + A_n`` with ``A_0 = Q``
spanned by the unit; products landing above degree ``n`` vanish. Classes are
dense coordinate vectors per degree with exact ``Fraction`` coefficients.

``projective_ring(n)`` is the Chow ring of P^n, ``Q[h]/(h^{n+1})``. Custom
rings are given by structure constants on a basis of each graded piece.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import (
    InternalConsistencyError,
    InvalidChernPolynomial,
    StructuralError,
    UnsupportedDegree,
)

Scalar = Union[int, Fraction]

# Todd class is implemented through this degree (HRR on surfaces and threefolds).
MAX_TODD_DEGREE = 3


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise TypeError(f"expected an exact rational, got {x!r}")
    return Fraction(x)


@dataclass(frozen=True)
class RingSpec:
    """Structure data of a truncated graded ring.

    ``structure`` lists ``((i, a, j, b), vector)``: the product of basis vector
    ``a`` of degree ``i`` with basis vector ``b`` of degree ``j`` expressed in
    the basis of degree ``i + j``. Missing pairs multiply to zero. The unit
    (degree 0) is implicit and never listed.
    """

    dim: int
    kind: str
    graded_ranks: tuple[int, ...]
    structure: tuple[tuple[tuple[int, int, int, int], tuple[Fraction, ...]], ...]
    degree_map: tuple[Fraction, ...]
    hyperplane: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.dim < 0:
            raise StructuralError("ring dimension must be non-negative")
        if len(self.graded_ranks) != self.dim + 1 or self.graded_ranks[0] != 1:
            raise StructuralError("graded_ranks must have length dim+1 and start with 1")
        if len(self.degree_map) != self.graded_ranks[-1]:
            raise StructuralError("degree_map must be a functional on the top graded piece")
        if self.hyperplane is not None and (
            self.dim < 1 or len(self.hyperplane) != self.graded_ranks[1]
        ):
            raise StructuralError("hyperplane must be a degree-1 vector")

    @cached_property
    def _table(self) -> dict:
        return dict(self.structure)

    @property
    def is_projective(self) -> bool:
        return self.kind == "projective"

    def product(self, i: int, a: int, j: int, b: int) -> tuple[Fraction, ...] | None:
        if i + j > self.dim:
            return None
        if i == 0:
            return tuple(Fraction(int(k == b)) for k in range(self.graded_ranks[j]))
        if j == 0:
            return tuple(Fraction(int(k == a)) for k in range(self.graded_ranks[i]))
        if self.is_projective:
            return (Fraction(1),)
        return self._table.get((i, a, j, b))

    def basis(self):
        for deg, rk in enumerate(self.graded_ranks):
            for idx in range(rk):
                yield deg, idx

    def check_axioms(self) -> None:
        """Exhaustively check commutativity and associativity on basis triples."""
        for (i, a), (j, b) in itertools.product(self.basis(), repeat=2):
            if basis_class(self, i, a) * basis_class(self, j, b) != basis_class(
                self, j, b
            ) * basis_class(self, i, a):
                raise StructuralError(f"product not commutative on e[{i},{a}] e[{j},{b}]")
        for (i, a), (j, b), (k, c) in itertools.product(self.basis(), repeat=3):
            if i + j + k > self.dim or 0 in (i, j, k):
                continue
            x, y, z = basis_class(self, i, a), basis_class(self, j, b), basis_class(self, k, c)
            if (x * y) * z != x * (y * z):
                raise StructuralError(
                    f"product not associative on e[{i},{a}] e[{j},{b}] e[{k},{c}]"
                )


@lru_cache(maxsize=None)
def projective_ring(n: int) -> RingSpec:
    """Chow ring of P^n: one generator ``h`` with ``deg(h^n) = 1``."""
    return RingSpec(
        dim=n,
        kind="projective",
        graded_ranks=(1,) * (n + 1),
        structure=(),
        degree_map=(Fraction(1),),
        hyperplane=(Fraction(1),) if n >= 1 else None,
    )


def custom_ring(
    graded_ranks: Sequence[int],
    products: dict,
    degree_map: Sequence[Scalar],
    hyperplane: Sequence[Scalar] | None = None,
) -> RingSpec:
    """Build a custom ring; ``products`` maps ``(i, a, j, b)`` to a coefficient list.

    A product given in one order only is mirrored, Chow rings being commutative.
    """
    table: dict = {}
    for key, vec in products.items():
        i, a, j, b = (int(t) for t in key)
        table[(i, a, j, b)] = tuple(_frac(v) for v in vec)
    for (i, a, j, b), vec in list(table.items()):
        table.setdefault((j, b, i, a), vec)
    n = len(graded_ranks) - 1
    for (i, a, j, b), vec in table.items():
        if min(i, j) < 1 or i + j > n:
            raise StructuralError(f"product key {(i, a, j, b)} outside degrees 1..{n}")
        if a >= graded_ranks[i] or b >= graded_ranks[j] or len(vec) != graded_ranks[i + j]:
            raise StructuralError(f"product {(i, a, j, b)} has the wrong shape")
    ring = RingSpec(
        dim=n,
        kind="custom",
        graded_ranks=tuple(int(r) for r in graded_ranks),
        structure=tuple(sorted(table.items())),
        degree_map=tuple(_frac(v) for v in degree_map),
        hyperplane=None if hyperplane is None else tuple(_frac(v) for v in hyperplane),
    )
    ring.check_axioms()
    return ring


@dataclass(frozen=True)
class GradedClass:
    ring: RingSpec
    comps: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.comps) != self.ring.dim + 1:
            raise StructuralError("class must have one component per degree 0..n")
        for deg, (vec, rk) in enumerate(zip(self.comps, self.ring.graded_ranks)):
            if len(vec) != rk:
                raise StructuralError(f"degree {deg} component has length {len(vec)}, expected {rk}")
        object.__setattr__(
            self,
            "comps",
            tuple(tuple(x if type(x) is Fraction else _frac(x) for x in vec) for vec in self.comps),
        )

    def _check(self, other: "GradedClass") -> None:
        if self.ring is not other.ring and self.ring != other.ring:
            raise StructuralError("classes live in different rings")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = other * one(self.ring)
        self._check(other)
        return GradedClass(
            self.ring,
            tuple(tuple(x + y for x, y in zip(u, v)) for u, v in zip(self.comps, other.comps)),
        )

    __radd__ = __add__

    def __neg__(self):
        return GradedClass(self.ring, tuple(tuple(-x for x in v) for v in self.comps))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GradedClass(self.ring, tuple(tuple(x * other for x in v) for v in self.comps))
        if not isinstance(other, GradedClass):
            return NotImplemented
        self._check(other)
        ring = self.ring
        n = ring.dim
        if ring.is_projective:
            out = _convolve([v[0] for v in self.comps], [v[0] for v in other.comps], n)
            return GradedClass(ring, tuple((x,) for x in out))
        acc = [[Fraction(0)] * rk for rk in ring.graded_ranks]
        for i, u in enumerate(self.comps):
            for j, v in enumerate(other.comps):
                if i + j > n:
                    break
                for a, x in enumerate(u):
                    if not x:
                        continue
                    for b, y in enumerate(v):
                        if not y:
                            continue
                        vec = ring.product(i, a, j, b)
                        if vec is None:
                            continue
                        for k, z in enumerate(vec):
                            acc[i + j][k] += x * y * z
        return GradedClass(ring, tuple(tuple(v) for v in acc))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, m: int) -> "GradedClass":
        if m < 0:
            return self.inverse() ** (-m)
        out = one(self.ring)
        for _ in range(m):
            out = out * self
        return out

    def component(self, k: int) -> GradedClass:
        """Degree-``k`` part as a class (zero elsewhere)."""
        return GradedClass(
            self.ring,
            tuple(v if d == k else tuple(Fraction(0) for _ in v) for d, v in enumerate(self.comps)),
        )

    def coeff(self, k: int) -> Fraction:
        """Scalar coefficient in degree ``k`` for rings with rank-1 graded pieces."""
        if k > self.ring.dim:
            return Fraction(0)
        vec = self.comps[k]
        if len(vec) != 1:
            raise StructuralError(f"degree {k} is not one-dimensional")
        return vec[0]

    @property
    def unit_part(self) -> Fraction:
        return self.comps[0][0]

    def is_pure(self, k: int) -> bool:
        return all(not any(v) for d, v in enumerate(self.comps) if d != k)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for v in self.comps for x in v)

    def inverse(self) -> GradedClass:
        """Multiplicative inverse; defined when the unit part is non-zero."""
        u = self.unit_part
        if u == 0:
            raise InvalidChernPolynomial("class with zero unit part is not invertible")
        if self.ring.is_projective:
            # d_k = -(1/u) sum_{i>=1} c_i d_{k-i}
            c = [v[0] for v in self.comps]
            d = [1 / u]
            for k in range(1, self.ring.dim + 1):
                d.append(-sum((c[i] * d[k - i] for i in range(1, k + 1)), Fraction(0)) / u)
            return GradedClass(self.ring, tuple((x,) for x in d))
        nil = self * (1 / u) - 1
        out = one(self.ring)
        term = one(self.ring)
        for _ in range(self.ring.dim):
            term = term * (-nil)
            out = out + term
        return out * (1 / u)

    def degree(self) -> Fraction:
        """Apply the degree map to the top component."""
        return sum(
            (x * y for x, y in zip(self.comps[-1], self.ring.degree_map)), Fraction(0)
        )

    def __str__(self) -> str:
        if not self.ring.is_projective:
            parts = [
                f"{list(map(str, v))}_{d}" for d, v in enumerate(self.comps) if any(v)
            ]
            return " + ".join(parts) if parts else "0"
        return format_polynomial([v[0] for v in self.comps], "h")


def _convolve(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> list[Fraction]:
    """Truncated product of coefficient lists; integer data stays in ints."""
    if all(x.denominator == 1 for x in a) and all(y.denominator == 1 for y in b):
        ai = [x.numerator for x in a]
        bi = [y.numerator for y in b]
        return [Fraction(sum(ai[i] * bi[k - i] for i in range(k + 1))) for k in range(n + 1)]
    return [sum((a[i] * b[k - i] for i in range(k + 1)), Fraction(0)) for k in range(n + 1)]


def format_polynomial(coeffs: Sequence[Fraction], var: str) -> str:
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and mag == 1:
            body = mono
        elif mag.denominator != 1 and mono:
            body = f"({mag}){mono}"
        else:
            body = f"{mag}{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def one(ring: RingSpec) -> GradedClass:
    return GradedClass(
        ring,
        tuple(
            tuple(Fraction(int(d == 0)) for _ in range(rk))
            for d, rk in enumerate(ring.graded_ranks)
        ),
    )


def zero(ring: RingSpec) -> GradedClass:
    return GradedClass(ring, tuple(tuple(Fraction(0) for _ in range(rk)) for rk in ring.graded_ranks))


def basis_class(ring: RingSpec, deg: int, idx: int) -> GradedClass:
    return GradedClass(
        ring,
        tuple(
            tuple(Fraction(int(d == deg and k == idx)) for k in range(rk))
            for d, rk in enumerate(ring.graded_ranks)
        ),
    )


def from_coefficients(ring: RingSpec, coeffs: Iterable[Scalar]) -> GradedClass:
    """Class ``sum c_k h^k`` in a ring with rank-1 graded pieces; extra terms truncate."""
    vals = list(coeffs)[: ring.dim + 1]
    vals += [0] * (ring.dim + 1 - len(vals))
    if any(rk != 1 for rk in ring.graded_ranks):
        raise StructuralError("from_coefficients needs rank-1 graded pieces")
    return GradedClass(ring, tuple((_frac(v),) for v in vals))


def from_vectors(ring: RingSpec, vectors: Sequence) -> GradedClass:
    """Class from one entry per degree 0..k; scalars are accepted for rank-1 pieces."""
    comps = []
    for d, rk in enumerate(ring.graded_ranks):
        if d < len(vectors):
            v = vectors[d]
            v = [v] if not isinstance(v, (list, tuple)) else list(v)
        else:
            v = [0] * rk
        comps.append(tuple(_frac(x) for x in v))
    return GradedClass(ring, tuple(comps))


def hyperplane_class(ring: RingSpec) -> GradedClass:
    if ring.hyperplane is None:
        raise StructuralError("ring has no designated hyperplane class")
    return GradedClass(
        ring,
        tuple(
            ring.hyperplane if d == 1 else tuple(Fraction(0) for _ in range(rk))
            for d, rk in enumerate(ring.graded_ranks)
        ),
    )


def class_mul(a: GradedClass, b: GradedClass) -> GradedClass:
    return a * b


@dataclass(frozen=True)
class ChernPolynomial:
    """Total Chern class (unit part exactly 1) together with a rank."""

    total: GradedClass
    rank: int | None = None

    def __post_init__(self):
        if self.total.unit_part != 1:
            raise InvalidChernPolynomial(
                f"degree-0 component must be 1, got {self.total.comps[0][0]}"
            )

    @classmethod
    def from_classes(
        cls, ring: RingSpec, classes: Sequence, rank: int | None = None
    ) -> ChernPolynomial:
        """From ``[c_1, c_2, ...]``; entries beyond ``dim`` must vanish."""
        classes = list(classes)
        for extra in classes[ring.dim :]:
            vals = extra if isinstance(extra, (list, tuple)) else [extra]
            if any(_frac(v) for v in vals):
                raise InvalidChernPolynomial(
                    f"Chern class beyond degree {ring.dim} must vanish"
                )
        return cls(from_vectors(ring, [1] + classes[: ring.dim]), rank)

    @property
    def ring(self) -> RingSpec:
        return self.total.ring

    def c(self, i: int) -> Fraction:
        return self.total.coeff(i)

    def classes(self) -> list:
        """``[c_1, ..., c_n]`` as scalars (rank-1 pieces) or coordinate lists."""
        out = []
        for vec in self.total.comps[1:]:
            out.append(vec[0] if len(vec) == 1 else list(vec))
        return out

    def is_integral(self) -> bool:
        return self.total.is_integral()

    def dual(self) -> ChernPolynomial:
        comps = tuple(
            tuple(x if d % 2 == 0 else -x for x in v) for d, v in enumerate(self.total.comps)
        )
        return ChernPolynomial(GradedClass(self.ring, comps), self.rank)

    def __mul__(self, other: ChernPolynomial) -> ChernPolynomial:
        """Whitney sum: total classes multiply, ranks add."""
        rank = None if self.rank is None or other.rank is None else self.rank + other.rank
        return ChernPolynomial(self.total * other.total, rank)

    def __pow__(self, m: int) -> ChernPolynomial:
        if m < 0:
            raise ValueError("use chern_invert for inverses")
        out = ChernPolynomial(one(self.ring), 0)
        for _ in range(m):
            out = out * self
        return out

    def __str__(self) -> str:
        return str(self.total)


def chern_invert(c: ChernPolynomial, rank: int | None = None) -> ChernPolynomial:
    """The unique ``d`` with ``c * d = 1`` in the truncated ring.

    The rank of the result is not determined by the class and is supplied by
    the caller (``w - r`` for a syzygy bundle).
    """
    return ChernPolynomial(c.total.inverse(), rank)


def chern_of_twist(c: ChernPolynomial, line: GradedClass, rank: int | None = None) -> ChernPolynomial:
    """Total Chern class of ``E (x) L`` where ``line = c_1(L)``.

    Uses ``c(E(x)L) = sum_j c_j(E) (1 + l)^{r-j}``; for ``r < j`` the power is a
    formal inverse, which is what the binomial series with negative exponent
    gives.
    """
    r = c.rank if rank is None else rank
    if r is None:
        raise InvalidChernPolynomial("twisting needs the rank")
    if not line.is_pure(1):
        raise StructuralError("twisting class must be pure of degree 1")
    ring = c.ring
    base = one(ring) + line
    total = zero(ring)
    for j in range(ring.dim + 1):
        cj = c.total.component(j)
        if not any(cj.comps[j]):
            continue
        total = total + cj * (base ** (r - j))
    return ChernPolynomial(total, r)


def _power_sums(c: ChernPolynomial) -> list[GradedClass]:
    """Newton power sums ``p_k`` of the Chern roots, ``p_0`` omitted."""
    ring = c.ring
    e = [c.total.component(k) for k in range(ring.dim + 1)]
    p: list[GradedClass] = [zero(ring)]
    for k in range(1, ring.dim + 1):
        acc = e[k] * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            acc = acc + e[i] * p[k - i] * ((-1) ** (i - 1))
        p.append(acc)
    return p


def chern_character(c: ChernPolynomial) -> GradedClass:
    """``ch = r + sum_k p_k / k!`` with exact coefficients."""
    if c.rank is None:
        raise InvalidChernPolynomial("Chern character needs the rank")
    p = _power_sums(c)
    out = one(c.ring) * c.rank
    for k in range(1, c.ring.dim + 1):
        out = out + p[k] * Fraction(1, factorial(k))
    return out


def chern_from_character(ch: GradedClass) -> ChernPolynomial:
    """Inverse of :func:`chern_character` (Newton's identities run backwards)."""
    ring = ch.ring
    rank = ch.unit_part
    if rank.denominator != 1:
        raise InvalidChernPolynomial(f"rank {rank} is not an integer")
    p = [ch.component(k) * factorial(k) for k in range(ring.dim + 1)]
    e = [one(ring)]
    for k in range(1, ring.dim + 1):
        acc = zero(ring)
        for i in range(1, k + 1):
            acc = acc + e[k - i] * p[i] * ((-1) ** (i - 1))
        e.append(acc * Fraction(1, k))
    total = zero(ring)
    for k, ek in enumerate(e):
        total = total + ek.component(k)
    return ChernPolynomial(total, int(rank))


class Ambient(NamedTuple):
    """Minimal HRR data: intersection ring and tangent Chern polynomial."""

    ring: RingSpec
    tangent: ChernPolynomial


def projective_tangent(n: int) -> ChernPolynomial:
    ring = projective_ring(n)
    return ChernPolynomial((one(ring) + hyperplane_class(ring)) ** (n + 1), n)


def projective_ambient(n: int) -> Ambient:
    return Ambient(projective_ring(n), projective_tangent(n))


def todd_class(X) -> GradedClass:
    """Todd class ``1 + c1/2 + (c1^2 + c2)/12 + c1 c2/24`` truncated at ``dim X``.

    ``X`` is anything with ``ring`` and ``tangent`` attributes.
    """
    ring = getattr(X, "ring", None)
    tangent = getattr(X, "tangent", None)
    if ring is None or tangent is None:
        raise UnsupportedDegree("variety carries no intersection ring / tangent class")
    if ring.dim > MAX_TODD_DEGREE:
        raise UnsupportedDegree(
            f"Todd class implemented through degree {MAX_TODD_DEGREE}, variety has dimension {ring.dim}"
        )
    c1 = tangent.total.component(1)
    c2 = tangent.total.component(2) if ring.dim >= 2 else zero(ring)
    return (
        one(ring)
        + c1 * Fraction(1, 2)
        + (c1 * c1 + c2) * Fraction(1, 12)
        + c1 * c2 * Fraction(1, 24)
    )


def euler_char_of_character(ch: GradedClass, X) -> int:
    value = (ch * todd_class(X)).degree()
    if value.denominator != 1:
        raise InternalConsistencyError(f"Hirzebruch-Riemann-Roch produced non-integer {value}")
    return int(value)


def euler_char_hrr(c: ChernPolynomial, X) -> int:
    """``chi(E) = deg(ch(E) td(X))``; raises instead of rounding a non-integer."""
    return euler_char_of_character(chern_character(c), X)
