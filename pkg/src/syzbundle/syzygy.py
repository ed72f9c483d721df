"""Syzygy bundles of a pair (F, W): membership in U and V, the construction,
simplicity, the endomorphism table, and reconstruction of F from S.

U collects globally generated simple bundles with ``h^1(F) = h^1(F^*) = 0``;
V is the part of U with ``h^2(F^*) = 0``, considered when ``h^1(O_X) = 0``.
For F in U the syzygy bundle S is simple with ``h^0(S) = 0`` and
``H^0(S^*) = W^*``; the map F -> S embeds U locally closed into the moduli of
simple bundles, and V openly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .cohom import CohomologyTable, DimEntry, SesProblem, at_least, exact, les_solve, table_sum
from .errors import (
    InconsistencyError,
    InternalConsistencyError,
    PreconditionError,
    UnsupportedError,
)
from .expr import Expr, LineBundle, SyzygyOf, as_expr
from .ring import chern_character, chern_invert, euler_char_of_character
from .sheaf import BundleFacts, VarietySpec, resolver

GENERIC_W_NOTE = (
    "generic-W assumption: W is a general w-dimensional space of sections, "
    "so W (x) O_X -> F is surjective once F is globally generated"
)


def _status(entry: DimEntry) -> str:
    if entry.is_zero:
        return "holds"
    if entry.is_nonzero:
        return "fails"
    return "unknown"


def _flag_status(flag: bool | None) -> str:
    return "unknown" if flag is None else ("holds" if flag else "fails")


@dataclass(frozen=True)
class FactStatus:
    condition: str
    status: str
    source: str

    def to_json(self) -> dict[str, str]:
        return {"condition": self.condition, "status": self.status, "source": self.source}


def _combine(statuses) -> bool | None:
    statuses = list(statuses)
    if "fails" in statuses:
        return False
    if "unknown" in statuses:
        return None
    return True


@dataclass(frozen=True)
class MembershipVerdict:
    in_U: bool | None
    in_V: bool | None
    blocking_facts: tuple[FactStatus, ...]

    def __post_init__(self):
        if self.in_V and not self.in_U:
            raise InternalConsistencyError("V membership without U membership")

    @property
    def reasons(self) -> list[str]:
        return [f"{f.condition}: {f.status}" for f in self.blocking_facts if f.status != "holds"]

    def to_json(self) -> dict[str, Any]:
        return {
            "in_U": self.in_U,
            "in_V": self.in_V,
            "facts": [f.to_json() for f in self.blocking_facts],
        }


def check_membership(F: BundleFacts, X: VarietySpec) -> MembershipVerdict:
    """Three-valued membership; an undetermined fact never counts as holding."""
    src = F.sources
    u_facts = [
        FactStatus("locally free", "holds", "assumed"),
        FactStatus(
            "globally generated",
            _flag_status(F.globally_generated),
            src.get("globally_generated", "unknown"),
        ),
        FactStatus("simple", _flag_status(F.simple), src.get("simple", "unknown")),
        FactStatus("h^1(F) = 0", _status(F.h[1]), src.get("h", "unknown")),
        FactStatus("h^1(F*) = 0", _status(F.h_dual[1]), src.get("h_dual", "unknown")),
    ]
    v_facts = [
        FactStatus("h^2(F*) = 0", _status(F.h_dual[2]), src.get("h_dual", "unknown")),
        FactStatus("h^1(O_X) = 0", _status(X.h1_O), "variety"),
    ]
    in_U = _combine(f.status for f in u_facts)
    if in_U is False:
        in_V = False
    else:
        in_V = _combine([f.status for f in v_facts] + ["unknown" if in_U is None else "holds"])
    return MembershipVerdict(in_U, in_V, tuple(u_facts + v_facts))


class Embedding(str, Enum):
    LOCALLY_CLOSED = "LocallyClosedEmbedding"
    OPEN = "OpenEmbedding"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class SyzygyResult:
    F: BundleFacts
    w: int
    S: BundleFacts
    membership: MembershipVerdict
    simple: bool | None
    h0_S: DimEntry
    h0_Sdual: DimEntry
    embedding: Embedding
    reasons: list[str] = field(default_factory=list)
    provenance: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    X: VarietySpec | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "F": self.F.to_json(),
            "w": self.w,
            "S": self.S.to_json(),
            "membership": self.membership.to_json(),
            "simple": self.simple,
            "h0_S": self.h0_S.to_json(),
            "h0_Sdual": self.h0_Sdual.to_json(),
            "embedding": self.embedding.value,
            "reasons": list(self.reasons),
            "provenance": dict(sorted(self.provenance.items())),
            "notes": list(self.notes),
        }


def _is_trivial(F: BundleFacts) -> bool:
    return F.split == (0,)


def build_syzygy(
    F: Expr | str, w: int, X: VarietySpec, F_facts: BundleFacts | None = None
) -> SyzygyResult:
    """Facts about ``S = ker(W (x) O_X -> F)`` together with the verdicts."""
    F = as_expr(F)
    res = resolver(X)
    Ff = F_facts if F_facts is not None else res.facts(F)
    r = Ff.rank
    if _is_trivial(Ff):
        raise PreconditionError("F = O_X is excluded: it has a single section, so no w ≥ n + 1 exists")
    if w < X.n + r:
        raise PreconditionError(f"w ≥ n + r required: w = {w} < {X.n} + {r}")
    v = Ff.h[0]
    if v.exact and w > v.value:
        raise PreconditionError(f"w = {w} exceeds h^0(F) = {v.value}")
    if Ff.globally_generated is False:
        raise PreconditionError(
            "F is not globally generated, so no evaluation map onto F is surjective"
        )
    notes = [GENERIC_W_NOTE]
    if Ff.globally_generated is None:
        notes.append("global generation of F is undetermined; the construction is conditional")
    if not v.exact:
        notes.append(f"h^0(F) is only known as {v}; w ≤ h^0(F) not verified")

    S_expr = SyzygyOf(F, w)
    S = res.facts(S_expr)
    membership = check_membership(Ff, X)
    provenance = {"h0_S": "solver", "h0_Sdual": "solver"}
    reasons: list[str] = []
    h0_S, h0_Sd = S.h[0], S.h_dual[0]

    if membership.in_U:
        for name, entry, value in (("h^0(S)", h0_S, 0), ("h^0(S*)", h0_Sd, w)):
            if not entry.admits(value):
                raise InconsistencyError(
                    f"{name}: theorem gives {value}, dimension chase gives {entry}",
                    name,
                    "theorem vs solver",
                )
        S.h = S.h.meet(CohomologyTable((exact(0),) + S.h.entries[1:]), "S")
        S.h_dual = S.h_dual.meet(CohomologyTable((exact(w),) + S.h_dual.entries[1:]), "S*")
        h0_S, h0_Sd = exact(0), exact(w)
        provenance = {"h0_S": "theorem", "h0_Sdual": "theorem", "simple": "theorem"}
        simple: bool | None = True
        S.simple = True
        S.sources["simple"] = "theorem"
        if membership.in_V:
            embedding = Embedding.OPEN
            reasons.append("F in V: h^1(F) = h^1(F*) = h^2(F*) = 0 and h^1(O_X) = 0")
        else:
            embedding = Embedding.LOCALLY_CLOSED
            reasons.append("F in U")
            reasons += [f"not open: {r}" for r in membership.reasons]
    else:
        embedding = Embedding.NOT_APPLICABLE
        reasons += [f"not in U: {r}" for r in membership.reasons]
        simple = None
        if S.split is not None and len(S.split) >= 2:
            simple = False
            provenance["simple"] = "structural"
            reasons.append(f"S splits as a sum of {len(S.split)} line bundles")
        else:
            try:
                endo = endo_cohomology(F, w, X)
            except UnsupportedError:
                endo = None
            if endo is not None and endo[0].exact:
                simple = endo[0].value == 1
                provenance["simple"] = "solver"
            elif endo is not None and endo[0].lo >= 2:
                simple = False
                provenance["simple"] = "solver"
        if simple is not None:
            S.simple = simple
            S.sources["simple"] = provenance["simple"]
    return SyzygyResult(
        F=Ff,
        w=w,
        S=S,
        membership=membership,
        simple=simple,
        h0_S=h0_S,
        h0_Sdual=h0_Sd,
        embedding=embedding,
        reasons=reasons,
        provenance=provenance,
        notes=notes,
        X=X,
    )


def _line_degree(F: Expr, X: VarietySpec) -> int | None:
    degrees = resolver(X).split(F)
    if degrees is not None and len(degrees) == 1:
        return degrees[0]
    return None


def endo_cohomology(
    F: Expr | str, w: int, X: VarietySpec, simple: bool | None = None
) -> CohomologyTable:
    """Table of ``S (x) S^*`` for ``S = syz(F, w)``.

    Split S is handled directly. For a line bundle ``F = O(d)`` two sequences
    are chained: ``0 -> S(-d) -> W (x) O(-d) -> O -> 0`` pins ``S(-d)``, then
    ``0 -> S(-d) -> W^* (x) S -> S^* (x) S -> 0`` pins the endomorphisms.
    """
    F = as_expr(F)
    res = resolver(X)
    S_expr = SyzygyOf(F, w)
    res.rank(S_expr)
    degrees = res.split(S_expr)
    if degrees is not None:
        return table_sum([X.line_bundle_table(a - b) for a in degrees for b in degrees])
    d = _line_degree(F, X)
    if d is None:
        raise UnsupportedError("endomorphism table needs F to be a line bundle or S to split")
    if not X.projective_space and d not in (0, X.omega):
        raise UnsupportedError(f"tables of O({-d}) twists are unknown on {X.name}")
    A = res.table(S_expr, -d)
    B = table_sum([X.line_bundle_table(-d)], [w])
    A = les_solve(SesProblem(A, B, X.h_O, names=("S(-d)", "W(x)O(-d)", "O"))).A
    seed = exact(1) if simple else at_least(1)
    C = CohomologyTable((seed,) + (DimEntry(),) * X.n)
    p = les_solve(
        SesProblem(A, table_sum([res.table(S_expr)], [w]), C, names=("S(-d)", "W*(x)S", "End S"))
    )
    end = p.C
    if X.ringed and end.is_exact:
        S_chern = res.chern(S_expr)
        if S_chern is not None:
            ch = chern_character(S_chern) * chern_character(S_chern.dual())
            chi = euler_char_of_character(ch, X)
            if chi != end.euler_char:
                raise InternalConsistencyError(
                    f"End S: chase gives chi {end.euler_char}, Riemann-Roch gives {chi}"
                )
    return end


def endo_table_for(S_expr: SyzygyOf, X: VarietySpec) -> CohomologyTable:
    return endo_cohomology(S_expr.inner, S_expr.w, X)


@dataclass(frozen=True)
class CheckRow:
    name: str
    passed: bool
    detail: str

    def to_json(self) -> dict[str, Any]:
        return {"check": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ReconstructionReport:
    refused: str | None
    checks: tuple[CheckRow, ...] = ()

    @property
    def passed(self) -> bool:
        return self.refused is None and all(c.passed for c in self.checks)

    def to_json(self) -> dict[str, Any]:
        return {
            "refused": self.refused,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


def reconstruct_check(result: SyzygyResult, F: BundleFacts | None = None, w: int | None = None):
    """Recover F from ``(S^*, H^0(S^*))`` at the level of invariants."""
    F = result.F if F is None else F
    w = result.w if w is None else w
    X = result.X
    if result.membership.in_U is not True:
        why = "not in U" if result.membership.in_U is False else "membership in U undetermined"
        return ReconstructionReport(why)
    S = result.S
    rows = []
    rows.append(
        CheckRow(
            "h^0(S*) = w",
            result.h0_Sdual.exact and result.h0_Sdual.value == w,
            f"h^0(S*) = {result.h0_Sdual}, w = {w}",
        )
    )
    rows.append(
        CheckRow("rank", w - S.rank == F.rank, f"w - rank(S) = {w - S.rank}, rank(F) = {F.rank}")
    )
    if S.chern is not None and F.chern is not None:
        rec = chern_invert(S.chern.dual(), w - S.rank)
        rows.append(
            CheckRow("Chern class of F*", rec == F.chern.dual(), f"{rec} vs {F.chern.dual()}")
        )
    A = CohomologyTable((exact(0),) + (DimEntry(),) * X.n)
    p = les_solve(SesProblem(A, table_sum([X.h_O], [w]), S.h_dual, names=("F*", "W*(x)O", "S*")))
    try:
        p.A.meet(F.h_dual, "F*")
        ok = True
    except InconsistencyError:
        ok = False
    rows.append(CheckRow("cohomology of F*", ok, f"reconstructed {p.A}, original {F.h_dual}"))
    return ReconstructionReport(None, tuple(rows))


__all__ = [
    "Embedding",
    "FactStatus",
    "MembershipVerdict",
    "ReconstructionReport",
    "SyzygyResult",
    "build_syzygy",
    "check_membership",
    "endo_cohomology",
    "reconstruct_check",
]
