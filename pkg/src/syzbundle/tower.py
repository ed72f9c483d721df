"""Iterated syzygy construction with twisting back into U (or V).

Each step twists the current bundle ``E`` by the least ``N >= 0`` that makes
``E(N)`` globally generated (justified by Castelnuovo-Mumford regularity on
P^n) with ``h^1(E(N)) = h^1(E(N)^*) = 0`` and a legal range of ``w``, then
takes the syzygy bundle of a ``w``-dimensional space of sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .cohom import DimEntry
from .errors import PreconditionError, UnknownBlocked
from .expr import Expr, LineBundle, SyzygyOf, Twist, as_expr
from .moduli import ModuliReport, ext1_of, moduli_report
from .ring import one
from .sheaf import BundleFacts, VarietySpec, resolver
from .syzygy import SyzygyResult, build_syzygy

DEFAULT_SCAN_CAP = 50


def _require_pn(X: VarietySpec) -> None:
    if not X.projective_space:
        raise UnknownBlocked(f"regularity needs closed-form twists; {X.name} is not a projective space")


def cm_regularity(e: Expr | str, X: VarietySpec, cap: int = DEFAULT_SCAN_CAP) -> int:
    """Least ``m`` with ``h^i(e(m - i)) = 0`` for all ``i >= 1``.

    Regularity is inherited upwards, so the scan starts at 0 and walks down
    while regular, up otherwise, within ``cap`` steps.
    """
    _require_pn(X)
    e = as_expr(e)
    res = resolver(X)

    def regular(m: int) -> bool:
        verdict = res.is_regular(e, m)
        if verdict is None:
            raise UnknownBlocked(f"cannot decide {m}-regularity of {e}: a twisted table is undetermined")
        return verdict

    m = 0
    if regular(m):
        for _ in range(cap):
            if not regular(m - 1):
                return m
            m -= 1
    else:
        for _ in range(cap):
            m += 1
            if regular(m):
                return m
    raise UnknownBlocked(f"regularity of {e} not found within {cap} twists of 0")


@dataclass(frozen=True)
class TowerPolicy:
    w_choice: str = "full"  # full | fixed | max-grassmann
    k: int | None = None
    steps: int = 1
    require_V: bool = False
    scan_cap: int = DEFAULT_SCAN_CAP

    def __post_init__(self):
        if self.w_choice not in ("full", "fixed", "max-grassmann"):
            raise PreconditionError(f"unknown w policy {self.w_choice!r}")
        if self.w_choice == "fixed" and self.k is None:
            raise PreconditionError("policy 'fixed' needs k")
        if self.steps < 1:
            raise PreconditionError("steps must be positive")

    def choose_w(self, lo: int, v: int) -> int | None:
        if lo > v:
            return None
        if self.w_choice == "full":
            return v
        if self.w_choice == "fixed":
            return self.k if lo <= self.k <= v else None
        best = max(range(lo, v + 1), key=lambda w: (w * (v - w), -w))
        return best


@dataclass
class TowerStep:
    index: int
    base: Expr
    twist_applied: int
    input_bundle: Expr
    input_facts: BundleFacts
    regularity: int | None
    chosen_w: int
    syzygy: SyzygyResult
    moduli: ModuliReport
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def S_facts(self) -> BundleFacts:
        return self.syzygy.S

    def to_json(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "base": str(self.base),
            "twist_applied": self.twist_applied,
            "input_bundle": str(self.input_bundle),
            "input": self.input_facts.to_json(),
            "regularity": self.regularity,
            "w": self.chosen_w,
            "syzygy": self.syzygy.to_json(),
            "moduli": self.moduli.to_json(),
            "checks": dict(sorted(self.checks.items())),
        }


@dataclass
class TowerRun:
    steps: list[TowerStep]
    status: str  # completed | halted
    reason: str | None = None
    blocked_by_unknown: bool = False

    def to_json(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "reason": self.reason,
            "blocked_by_unknown": self.blocked_by_unknown,
            "steps": [s.to_json() for s in self.steps],
        }


@dataclass(frozen=True)
class _Halt:
    reason: str
    unknown: bool = False


def _twisted(e: Expr, N: int) -> Expr:
    if N == 0:
        return e
    if isinstance(e, LineBundle):
        return LineBundle(e.degree + N)
    if isinstance(e, Twist):
        return _twisted(e.inner, e.n + N)
    return Twist(e, N)


def _conditions(f: BundleFacts, X: VarietySpec, require_V: bool) -> list[tuple[str, DimEntry]]:
    conds = [("h^1(E(N))", f.h[1]), ("h^1(E(N)*)", f.h_dual[1])]
    if require_V:
        conds += [("h^2(E(N)*)", f.h_dual[2]), ("h^1(O_X)", X.h1_O)]
    return conds


def _find_twist(E, X, policy, simple, index):
    """Least admissible twist; returns ``(N, facts, regularity, w)`` or a halt reason."""
    res = resolver(X)
    reg = None
    if X.projective_space:
        try:
            reg = cm_regularity(E, X, policy.scan_cap)
        except UnknownBlocked as exc:
            return _Halt(str(exc), unknown=True)
    elif index > 0:
        return _Halt(f"twists of step-{index} bundles on {X.name} need user-supplied tables", True)
    last_failure = None
    caps = range(policy.scan_cap + 1) if X.projective_space else range(1)
    for N in caps:
        EN = _twisted(E, N)
        f = res.facts(EN)
        if simple is not None and f.simple is None:
            f.simple = simple
            f.sources["simple"] = "theorem"
        gg = f.globally_generated
        if gg is None and reg is not None and N >= reg:
            gg = True
            f.globally_generated = True
            f.sources["globally_generated"] = f"regularity {reg}"
        if gg is False or (gg is None and reg is not None):
            last_failure = "global generation not established below the regularity"
            continue
        conds = _conditions(f, X, policy.require_V)
        unknown = [name for name, entry in conds if not entry.exact and not entry.is_nonzero]
        failing = [name for name, entry in conds if entry.is_nonzero]
        if gg is None:
            unknown.append("global generation")
        if f.simple is None:
            unknown.append("simplicity")
        elif f.simple is False:
            return _Halt(f"E({N}) is not simple")
        if failing:
            last_failure = ", ".join(f"{name} ≠ 0" for name in failing)
            if "h^1(O_X)" in failing:
                return _Halt("h^1(O_X) ≠ 0, so V is empty")
            continue
        if unknown:
            return _Halt(f"undetermined at twist {N}: {', '.join(unknown)}", True)
        v = f.h[0]
        if not v.exact:
            return _Halt(f"h^0(E({N})) undetermined", True)
        w = policy.choose_w(X.n + f.rank, v.value)
        if w is None:
            last_failure = f"no legal w: need {X.n + f.rank} ≤ w ≤ h^0 = {v.value}" + (
                f" with w = {policy.k}" if policy.w_choice == "fixed" else ""
            )
            continue
        return N, f, reg, w
    reason = f"twist insufficient within {policy.scan_cap} steps, increase scan bound"
    if last_failure:
        reason += f" (last failure: {last_failure})"
    if policy.require_V and X.n == 2 and last_failure and "h^2(E(N)*)" in last_failure:
        reason = (
            f"V is empty along twists of {E} on this surface: h^2(E(N)*) = h^0(E(N) (x) omega) "
            f"stays nonzero up to N = {policy.scan_cap}"
        )
    return _Halt(reason)


def tower_run(X: VarietySpec, start: Expr | str, policy: TowerPolicy | None = None) -> TowerRun:
    policy = policy or TowerPolicy()
    E = as_expr(start)
    steps: list[TowerStep] = []
    simple: bool | None = None
    ext1: DimEntry | None = None
    prev_rank = None
    prev_w = None
    for index in range(policy.steps):
        found = _find_twist(E, X, policy, simple, index)
        if isinstance(found, _Halt):
            return TowerRun(steps, "halted", f"step {index + 1}: {found.reason}", found.unknown)
        N, f, reg, w = found
        EN = _twisted(E, N)
        result = build_syzygy(EN, w, X, F_facts=f)
        if result.membership.in_U is not True:
            why = "; ".join(result.membership.reasons)
            return TowerRun(
                steps, "halted", f"step {index + 1}: E(N) not in U ({why})",
                result.membership.in_U is None,
            )
        if policy.require_V and result.membership.in_V is not True:
            return TowerRun(
                steps, "halted", f"step {index + 1}: E(N) not in V", result.membership.in_V is None
            )
        if ext1 is None:
            ext1 = ext1_of(EN, X)
        report = moduli_report(EN, w, X, result, ext1_F=ext1)
        checks = {"rank": result.S.rank == w - f.rank}
        if prev_rank is not None:
            checks["rank bookkeeping"] = f.rank == prev_w - prev_rank
        if result.S.chern is not None and f.chern is not None:
            prod = result.S.chern.total * f.chern.total
            checks["chern(S) chern(E(N)) = 1"] = prod == one(prod.ring)
        steps.append(
            TowerStep(index + 1, E, N, EN, f, reg, w, result, report, checks)
        )
        if not all(checks.values()):
            failed = [k for k, ok in checks.items() if not ok]
            return TowerRun(steps, "halted", f"step {index + 1}: bookkeeping failed: {', '.join(failed)}")
        E = SyzygyOf(EN, w)
        simple = True
        ext1 = report.tangent_Spl_S if report.tangent_Spl_S.exact else None
        prev_rank, prev_w = f.rank, w
    return TowerRun(steps, "completed")
