"""Dimension counts around the syzygy construction.

Four numbers matter at a pair (F, W): the Grassmannian fiber ``w(v - w)`` of
choices of W, the tangent space ``ext^1(F, F)`` of the base, and for S the
tangent ``ext^1(S, S)`` and obstruction ``ext^2(S, S)`` of the moduli of simple
bundles. The syzygy locus has dimension ``ext^1(F, F) + w(v - w)`` and its
codimension is compared with ``h^2(S (x) F^*)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .cohom import CohomologyTable, DimEntry, SesProblem, at_least, exact, les_solve, table_sum
from .errors import InconsistencyError, PreconditionError, UnsupportedError
from .expr import Dual, Expr, Opaque, SyzygyOf, Twist, as_expr
from .ring import chern_character, euler_char_of_character
from .sheaf import BundleFacts, VarietySpec, resolver
from .syzygy import SyzygyResult, build_syzygy, endo_cohomology

CONVENTION_NOTE = (
    "tangent of the pair space: the geometric value ext^1(F,F) + w(v-w) counts a "
    "Grassmann bundle over the base and is primary; the quotient value "
    "h^0(S* (x) F) - w^2 divides by all of W (x) W* and is one less whenever the "
    "scalars act trivially"
)


def _add(a: DimEntry, b: DimEntry) -> DimEntry:
    if a.exact and b.exact:
        return exact(a.value + b.value)
    return at_least(a.lo + b.lo) if (a.lo or b.lo) else DimEntry()


def grassmann_dim(w: int, v: int) -> int:
    """Dimension ``w(v - w)`` of the Grassmannian of w-planes in a v-space."""
    if w <= 0:
        raise PreconditionError(f"w must be positive, got {w}")
    if w > v:
        raise PreconditionError(f"w = {w} exceeds v = {v}")
    return w * (v - w)


def tangent_obstruction_spl(endo: CohomologyTable | None) -> tuple[DimEntry, DimEntry]:
    """``(ext^1(S,S), ext^2(S,S))`` read off the table of ``S (x) S^*``."""
    if endo is None:
        return DimEntry(), DimEntry()
    return endo[1], endo[2]


@dataclass(frozen=True)
class HrrDimension:
    value: DimEntry
    euler_char: int | None
    refused: str | None = None


def dim_spl_via_hrr(S: BundleFacts, X: VarietySpec, endo: CohomologyTable | None = None) -> HrrDimension:
    """``1 - chi(S (x) S^*)``, valid where S is simple and unobstructed with no
    higher endomorphism cohomology."""
    if not X.ringed:
        return HrrDimension(DimEntry(), None, f"Riemann-Roch unavailable on {X.name}")
    if S.chern is None:
        return HrrDimension(DimEntry(), None, "Chern classes of S unknown")
    ch = chern_character(S.chern) * chern_character(S.chern.dual())
    chi = euler_char_of_character(ch, X)
    if S.simple is not True:
        return HrrDimension(DimEntry(), chi, "simplicity of S not established")
    if endo is None:
        return HrrDimension(DimEntry(), chi, "ext^2(S,S) = 0 not established")
    for i in range(2, X.n + 1):
        if not endo[i].is_zero:
            return HrrDimension(DimEntry(), chi, f"h^{i}(S (x) S*) = 0 not established")
    return HrrDimension(exact(1 - chi), chi)


@dataclass(frozen=True)
class LemmaValues:
    hom_SF: int
    quotient_dim: int
    h1S: int
    ext1_lower: int
    surjectivity_gap: int

    def to_json(self) -> dict[str, int]:
        return {
            "hom_SF": self.hom_SF,
            "quotient_dim": self.quotient_dim,
            "h1_S": self.h1S,
            "ext1_lower": self.ext1_lower,
            "surjectivity_gap": self.surjectivity_gap,
        }


def lemma_formulas(w: int, h0F: int, h1OX: int) -> LemmaValues:
    """Closed forms for a line bundle F with ``h^i(F) = 0`` for ``i > 0``.

    ``h^0(S* (x) F) = w h^0(F) + h^1(O) - 1``, ``h^1(S) = h^0(F) - w + w h^1(O)``;
    the gap compares ``ext^1(S,S) >= w h^1(S)`` with the dimension of
    ``H^0(S* (x) F) / (W (x) W*)``.
    """
    hom = w * h0F + h1OX - 1
    quotient = w * (h0F - w) + h1OX - 1
    h1S = h0F - w + w * h1OX
    lower = w * h1S
    return LemmaValues(hom, quotient, h1S, lower, lower - quotient)


def hom_S_F(F: Expr | str, w: int, X: VarietySpec) -> CohomologyTable:
    """Table of ``S^* (x) F`` for a line bundle ``F = O(d)`` through
    ``0 -> O -> W^* (x) F -> S^* (x) F -> 0`` (the dual syzygy sequence twisted by F)."""
    F = as_expr(F)
    res = resolver(X)
    degrees = res.split(F)
    if degrees is None or len(degrees) != 1:
        raise UnsupportedError("S* (x) F is computed for line bundles F only")
    d = degrees[0]
    S = SyzygyOf(F, w)
    seed = res.dual_table(S, -d)
    p = les_solve(SesProblem(X.h_O, table_sum([X.line_bundle_table(d)], [w]), seed))
    return p.C


def ext1_of(e: Expr | str, X: VarietySpec) -> DimEntry:
    """``ext^1(E, E)`` when it can be read from the data, else unknown."""
    e = as_expr(e)
    res = resolver(X)
    if isinstance(e, (Twist, Dual)):
        return ext1_of(e.inner, X)
    degrees = res.split(e)
    if degrees is not None:
        return _split_ext1(degrees, X)
    if isinstance(e, Opaque):
        b = X.bundle(e.name)
        if b.rigid:
            return exact(0)
        if b.rank == 1:
            return X.h1_O
        return DimEntry()
    if isinstance(e, SyzygyOf):
        try:
            return endo_cohomology(e.inner, e.w, X)[1]
        except UnsupportedError:
            return DimEntry()
    return DimEntry()


def _split_ext1(degrees, X: VarietySpec) -> DimEntry:
    t = table_sum([X.line_bundle_table(a - b) for a in degrees for b in degrees])
    return t[1]


@dataclass(frozen=True)
class LocusDims:
    dim_syz: DimEntry
    codim: DimEntry
    normal_fiber_dim: DimEntry
    dim_spl: DimEntry
    notes: tuple[str, ...] = ()


def _normal_fiber(S: SyzygyOf, d: int, X: VarietySpec) -> DimEntry:
    """``h^2(S (x) F^*)`` with ``F = O(d)``, by two independent routes."""
    if X.n < 2:
        return DimEntry()
    res = resolver(X)
    direct = res.table(S, -d)
    # Serre: h^2(S(-d)) = h^{n-2}(S^*(d) (x) omega)
    via_dual = res.dual_table(S, -d - (X.omega or 0)) if X.omega is not None else None
    value = direct[2]
    if via_dual is not None:
        other = via_dual[X.n - 2]
        value = value.meet(other, "h^2(S (x) F*)")
    return value


def syz_locus_dims(
    F: Expr | str,
    w: int,
    X: VarietySpec,
    result: SyzygyResult | None = None,
    ext1_F: DimEntry | None = None,
    endo: CohomologyTable | None = None,
) -> LocusDims:
    F = as_expr(F)
    result = result if result is not None else build_syzygy(F, w, X)
    if result.membership.in_U is not True:
        raise PreconditionError("syzygy locus dimensions need F in U")
    res = resolver(X)
    degrees = res.split(F)
    line = degrees is not None and len(degrees) == 1
    if not line and not (isinstance(F, Opaque) and X.bundle(F.name).rank == 1):
        raise UnsupportedError("syzygy locus dimensions are computed for line bundles F")
    v = result.F.h[0]
    if not v.exact:
        raise UnsupportedError("h^0(F) must be known exactly")
    ext1_F = ext1_F if ext1_F is not None else ext1_of(F, X)
    dim_syz = _add(ext1_F, exact(grassmann_dim(w, v.value)))
    notes = []
    if endo is None:
        try:
            endo = endo_cohomology(F, w, X, simple=True)
        except UnsupportedError:
            endo = None
    ext1_S, ext2_S = tangent_obstruction_spl(endo)
    if result.membership.in_V:
        # open embedding: the tangent spaces agree
        ext1_S = ext1_S.meet(dim_syz, "ext^1(S,S)") if dim_syz.exact else ext1_S
        notes.append("F in V: the syzygy locus is open, codimension 0")
    dim_spl = ext1_S if ext2_S.is_zero else DimEntry()
    normal = _normal_fiber(SyzygyOf(F, w), degrees[0], X) if line else DimEntry()
    if result.membership.in_V:
        codim = exact(0)
        if dim_spl.exact and dim_syz.exact and dim_spl.value != dim_syz.value:
            raise InconsistencyError(
                f"open embedding but dim Spl = {dim_spl} differs from dim Syz = {dim_syz}",
                "codim",
                "open embedding",
            )
    elif dim_spl.exact and dim_syz.exact:
        codim = exact(dim_spl.value - dim_syz.value)
        if normal.exact and normal.value != codim.value:
            notes.append(f"codimension {codim} differs from h^2(S (x) F*) = {normal}")
    else:
        codim = DimEntry()
    return LocusDims(dim_syz, codim, normal, dim_spl, tuple(notes))


@dataclass(frozen=True)
class TangentG0:
    geometric: DimEntry
    quot_based: int | None  # may be negative at w = v, where scalars act trivially
    hom_SF: DimEntry
    note: str = CONVENTION_NOTE


def tangent_g0(
    F: Expr | str, w: int, X: VarietySpec, ext1_F: DimEntry | None = None
) -> TangentG0:
    F = as_expr(F)
    res = resolver(X)
    v = res.table(F)[0]
    ext1_F = ext1_F if ext1_F is not None else ext1_of(F, X)
    geometric = _add(ext1_F, exact(grassmann_dim(w, v.value))) if v.exact else DimEntry()
    try:
        hom = hom_S_F(F, w, X)[0]
    except UnsupportedError:
        hom = DimEntry()
    quot = hom.value - w * w if hom.exact else None
    return TangentG0(geometric, quot, hom)


@dataclass
class ModuliReport:
    dim_G0_fiber: int | None
    dim_U_tangent_at_F: DimEntry
    dim_G0_tangent: DimEntry
    dim_G0_tangent_quot: int | None
    tangent_Spl_S: DimEntry
    obstruction_Spl_S: DimEntry
    dim_Spl_at_S: DimEntry
    codim_syz: DimEntry
    normal_fiber_dim: DimEntry
    dim_syz: DimEntry
    hrr_dim: HrrDimension | None
    convention_note: str = CONVENTION_NOTE
    provenance: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        def tag(name: str, e: DimEntry | int | None):
            value = e.to_json() if isinstance(e, DimEntry) else e
            return {"value": value, "source": self.provenance.get(name, "solver")}

        out = {
            "dim_G0_fiber": tag("dim_G0_fiber", self.dim_G0_fiber),
            "dim_U_tangent_at_F": tag("dim_U_tangent_at_F", self.dim_U_tangent_at_F),
            "dim_G0_tangent": tag("dim_G0_tangent", self.dim_G0_tangent),
            "dim_G0_tangent_quot": tag("dim_G0_tangent_quot", self.dim_G0_tangent_quot),
            "tangent_Spl_S": tag("tangent_Spl_S", self.tangent_Spl_S),
            "obstruction_Spl_S": tag("obstruction_Spl_S", self.obstruction_Spl_S),
            "dim_Spl_at_S": tag("dim_Spl_at_S", self.dim_Spl_at_S),
            "codim_syz": tag("codim_syz", self.codim_syz),
            "normal_fiber_dim": tag("normal_fiber_dim", self.normal_fiber_dim),
            "dim_syz": tag("dim_syz", self.dim_syz),
            "convention_note": self.convention_note,
            "notes": list(self.notes),
        }
        if self.hrr_dim is not None:
            out["hrr"] = {
                "dim_Spl": self.hrr_dim.value.to_json(),
                "euler_char_End": self.hrr_dim.euler_char,
                "refused": self.hrr_dim.refused,
            }
        return out


def moduli_report(
    F: Expr | str,
    w: int,
    X: VarietySpec,
    result: SyzygyResult | None = None,
    ext1_F: DimEntry | None = None,
) -> ModuliReport:
    F = as_expr(F)
    result = result if result is not None else build_syzygy(F, w, X)
    v = result.F.h[0]
    fiber = grassmann_dim(w, v.value) if v.exact else None
    ext1_F = ext1_F if ext1_F is not None else ext1_of(F, X)
    prov = {"dim_G0_fiber": "structural", "dim_U_tangent_at_F": "solver"}
    notes: list[str] = []
    try:
        endo = endo_cohomology(F, w, X, simple=result.simple)
        prov.update(tangent_Spl_S="solver", obstruction_Spl_S="solver")
    except UnsupportedError as exc:
        endo = None
        notes.append(str(exc))
    ext1_S, ext2_S = tangent_obstruction_spl(endo)
    tg = tangent_g0(F, w, X, ext1_F)
    hrr = dim_spl_via_hrr(result.S, X, endo) if X.ringed else None
    dim_syz = tg.geometric
    codim = DimEntry()
    normal = DimEntry()
    if result.membership.in_V and dim_syz.exact and not ext1_S.exact:
        ext1_S = dim_syz
        prov["tangent_Spl_S"] = "theorem"
    try:
        locus = syz_locus_dims(F, w, X, result, ext1_F, endo)
        codim, normal = locus.codim, locus.normal_fiber_dim
        notes += list(locus.notes)
        if result.membership.in_V:
            prov["codim_syz"] = "theorem"
    except (PreconditionError, UnsupportedError) as exc:
        notes.append(str(exc))
    dim_spl = ext1_S if ext2_S.is_zero else DimEntry()
    if hrr is not None and hrr.value.exact and dim_spl.exact and hrr.value != dim_spl:
        raise InconsistencyError(
            f"ext^1(S,S): chase gives {dim_spl}, Riemann-Roch gives {hrr.value}",
            "ext^1(S,S)",
            "hrr",
        )
    if ext2_S.exact and not ext2_S.is_zero:
        notes.append("ext^2(S,S) is nonzero; only the tangent dimension is reported")
    return ModuliReport(
        dim_G0_fiber=fiber,
        dim_U_tangent_at_F=ext1_F,
        dim_G0_tangent=tg.geometric,
        dim_G0_tangent_quot=tg.quot_based,
        tangent_Spl_S=ext1_S,
        obstruction_Spl_S=ext2_S,
        dim_Spl_at_S=dim_spl,
        codim_syz=codim,
        normal_fiber_dim=normal,
        dim_syz=dim_syz,
        hrr_dim=hrr,
        provenance=prov,
        notes=notes,
    )
