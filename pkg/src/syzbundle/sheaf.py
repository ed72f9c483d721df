"""Varieties, bundle facts, and resolution of sheaf expressions to tables.

Resolution works twist by twist: ``table(e, k)`` is the table of ``e(k)`` and
``dual_table(e, k)`` that of ``e(k)^*``. Line bundles on P^n use the closed
form; syzygy bundles are pushed through their defining short exact sequences
and the dimension chase; Serre duality links the two sides.
"""

from __future__ import annotations

import json
from math import comb
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .cohom import (
    CohomologyTable,
    DimEntry,
    SesProblem,
    exact,
    les_solve,
    line_bundle_cohom_pn,
    serre_dual_table,
    table_sum,
)
from .errors import (
    InconsistencyError,
    InternalConsistencyError,
    PreconditionError,
    StructuralError,
    UnsupportedError,
)
from .expr import (
    DirectSum,
    Dual,
    Expr,
    LineBundle,
    Opaque,
    SyzygyOf,
    Tensor,
    Twist,
    as_expr,
    parse_expr,
    split_degrees,
)
from .ring import (
    ChernPolynomial,
    RingSpec,
    chern_character,
    chern_from_character,
    chern_invert,
    chern_of_twist,
    custom_ring,
    euler_char_hrr,
    hyperplane_class,
    one,
    projective_ring,
    projective_tangent,
)
from .ring import MAX_TODD_DEGREE

PROVENANCE = ("asserted", "asserted+solver", "closed-form", "solver", "theorem", "hrr", "structural")


@dataclass(frozen=True)
class OpaqueBundle:
    """User-declared bundle. ``kernel`` names ``K`` in ``0 -> K -> O^v -> F -> 0``
    with ``v = h^0(F)`` (the complete evaluation); ``rigid`` asserts ``ext^1(F,F) = 0``."""

    name: str
    rank: int
    chern: tuple | None = None
    h: CohomologyTable | None = None
    h_dual: CohomologyTable | None = None
    globally_generated: bool | None = None
    simple: bool | None = None
    kernel: Expr | None = None
    rigid: bool | None = None


@dataclass(frozen=True)
class VarietySpec:
    name: str
    n: int
    h_O: CohomologyTable
    omega: int | None
    ring: RingSpec | None = None
    tangent: ChernPolynomial | None = None
    projective_space: bool = False
    gorenstein: bool = True
    bundles: tuple[OpaqueBundle, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise StructuralError("varieties must have dimension at least 2")
        if self.h_O.dim != self.n:
            raise StructuralError(f"h_O has {len(self.h_O)} entries, expected {self.n + 1}")
        if not (self.h_O[0].exact and self.h_O[0].value == 1):
            raise StructuralError("h^0(O_X) must be exactly 1 (reduced and connected)")
        if not self.gorenstein:
            raise StructuralError("only Gorenstein varieties are supported")
        if self.omega == 0:
            # trivial dualizing sheaf: h^i(O) = h^{n-i}(O)
            try:
                self.h_O.meet(serre_dual_table(self.h_O, self.n), "h_O")
            except InconsistencyError:
                raise StructuralError(
                    f"h_O = {self.h_O} is not Serre self-dual, but omega is trivial"
                ) from None
        if self.ring is not None and self.ring.dim != self.n:
            raise StructuralError("intersection ring dimension differs from the variety's")

    @property
    def ringed(self) -> bool:
        """HRR is available: intersection ring, tangent class, and dimension <= 3."""
        return self.ring is not None and self.tangent is not None and self.n <= MAX_TODD_DEGREE

    @property
    def h1_O(self) -> DimEntry:
        return self.h_O[1]

    def bundle(self, name: str) -> OpaqueBundle:
        for b in self.bundles:
            if b.name == name:
                return b
        known = ", ".join(b.name for b in self.bundles) or "none"
        raise StructuralError(f"no bundle named {name!r} on {self.name} (declared: {known})")

    def with_bundles(self, bundles) -> VarietySpec:
        merged = {b.name: b for b in self.bundles}
        for b in bundles:
            merged[b.name] = b
        return replace(self, bundles=tuple(merged.values()))

    def line_bundle_table(self, d: int) -> CohomologyTable:
        """Table of ``O(d)``; off P^n only ``O`` and ``omega`` are known."""
        if self.projective_space:
            return line_bundle_cohom_pn(self.n, d)
        if d == 0:
            return self.h_O
        if self.omega is not None and d == self.omega:
            return serre_dual_table(self.h_O, self.n)
        return CohomologyTable.unknown(self.n)

    def line_class(self, d: int):
        if self.ring is None or self.ring.hyperplane is None:
            return None
        return hyperplane_class(self.ring) * d


def projective_space(n: int) -> VarietySpec:
    return VarietySpec(
        name=f"P{n}",
        n=n,
        h_O=line_bundle_cohom_pn(n, 0),
        omega=-n - 1,
        ring=projective_ring(n),
        tangent=projective_tangent(n),
        projective_space=True,
    )


def quintic_threefold() -> VarietySpec:
    return VarietySpec(
        name="CY3-quintic",
        n=3,
        h_O=CohomologyTable.of(1, 0, 0, 1),
        omega=0,
    )


CATALOG = {
    "P2": lambda: projective_space(2),
    "P3": lambda: projective_space(3),
    "P4": lambda: projective_space(4),
    "CY3-quintic": quintic_threefold,
}


def catalog(name: str) -> VarietySpec:
    try:
        return CATALOG[name]()
    except KeyError:
        raise StructuralError(
            f"unknown variety {name!r}; choose from {', '.join(CATALOG)} or load a file"
        ) from None


# ---------------------------------------------------------------- JSON input

_TOP_KEYS = {"name", "dim", "h_O", "omega", "ring", "tangent_chern", "bundles"}
_RING_KEYS = {"graded_ranks", "products", "degree_map", "hyperplane"}
_BUNDLE_KEYS = {
    "name", "rank", "chern", "h", "h_dual", "globally_generated", "simple", "kernel", "rigid",
}


def _reject_unknown(obj: Mapping, allowed: set, where: str) -> None:
    if not isinstance(obj, Mapping):
        raise StructuralError(f"{where} must be a JSON object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise StructuralError(f"unknown field(s) in {where}: {', '.join(extra)}")


def _table(raw, n: int, where: str) -> CohomologyTable:
    if not isinstance(raw, list) or len(raw) != n + 1:
        raise StructuralError(f"{where} must list {n + 1} entries")
    try:
        return CohomologyTable(tuple(DimEntry.parse(v) for v in raw))
    except ValueError as exc:
        raise StructuralError(f"{where}: {exc}") from None


def _omega_degree(raw) -> int:
    if isinstance(raw, bool):
        raise StructuralError("omega must be a degree or a line bundle like 'O(-3)'")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str):
        e = parse_expr(raw)
        if isinstance(e, LineBundle):
            return e.degree
    raise StructuralError("omega must be a degree or a line bundle like 'O(-3)'")


def _ring_from_json(raw) -> RingSpec:
    _reject_unknown(raw, _RING_KEYS, "ring")
    products = {}
    for key, vec in (raw.get("products") or {}).items():
        parts = [int(t) for t in str(key).split(",")]
        if len(parts) != 4:
            raise StructuralError(f"product key {key!r} must read 'i,a,j,b'")
        products[tuple(parts)] = vec
    return custom_ring(
        raw["graded_ranks"], products, raw["degree_map"], raw.get("hyperplane")
    )


def _bundle_from_json(raw, X: VarietySpec) -> OpaqueBundle:
    _reject_unknown(raw, _BUNDLE_KEYS, "bundle")
    name = raw.get("name")
    rank = raw.get("rank")
    if not isinstance(name, str) or not name:
        raise StructuralError("bundle needs a name")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank <= 0:
        raise StructuralError(f"bundle {name!r}: rank must be a positive integer")
    where = f"bundle {name!r}"
    h = _table(raw["h"], X.n, f"{where} h") if "h" in raw else None
    hd = _table(raw["h_dual"], X.n, f"{where} h_dual") if "h_dual" in raw else None
    chern = tuple(raw["chern"]) if raw.get("chern") is not None else None
    kernel = parse_expr(raw["kernel"]) if raw.get("kernel") is not None else None
    for flag in ("globally_generated", "simple", "rigid"):
        if flag in raw and raw[flag] is not None and not isinstance(raw[flag], bool):
            raise StructuralError(f"{where}: {flag} must be true, false or null")
    return OpaqueBundle(
        name=name,
        rank=rank,
        chern=chern,
        h=h,
        h_dual=hd,
        globally_generated=raw.get("globally_generated"),
        simple=raw.get("simple"),
        kernel=kernel,
        rigid=raw.get("rigid"),
    )


def load_input(source, base: VarietySpec | None = None) -> VarietySpec:
    """Read a variety and/or opaque bundles from a JSON file, string, or dict.

    With ``dim`` present the document defines a custom variety; otherwise its
    bundles are attached to ``base``.
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else source
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructuralError(f"input is not valid JSON: {exc}") from None
    _reject_unknown(doc, _TOP_KEYS, "input document")
    if "dim" in doc:
        n = doc["dim"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise StructuralError("dim must be an integer")
        ring = _ring_from_json(doc["ring"]) if doc.get("ring") is not None else None
        tangent = None
        if doc.get("tangent_chern") is not None:
            if ring is None:
                raise StructuralError("tangent_chern needs a ring")
            tangent = ChernPolynomial.from_classes(ring, doc["tangent_chern"], n)
        if "h_O" not in doc or "omega" not in doc:
            raise StructuralError("a custom variety needs h_O and omega")
        X = VarietySpec(
            name=doc.get("name", "custom"),
            n=n,
            h_O=_table(doc["h_O"], n, "h_O"),
            omega=_omega_degree(doc["omega"]),
            ring=ring,
            tangent=tangent,
        )
    else:
        if base is None:
            raise StructuralError("input has no 'dim'; pass a catalog variety for its bundles")
        for key in ("h_O", "omega", "ring", "tangent_chern"):
            if key in doc:
                raise StructuralError(f"field {key!r} only allowed together with 'dim'")
        X = base
    bundles = doc.get("bundles") or []
    if not isinstance(bundles, list):
        raise StructuralError("bundles must be a list")
    X = X.with_bundles([_bundle_from_json(b, X) for b in bundles])
    # validate every bundle eagerly so bad input fails at load time
    for b in X.bundles:
        facts(Opaque(b.name), X)
    return X


# ------------------------------------------------------------- bundle facts


@dataclass
class BundleFacts:
    expr: Expr | None
    rank: int
    chern: ChernPolynomial | None
    h: CohomologyTable
    h_dual: CohomologyTable
    globally_generated: bool | None = None
    simple: bool | None = None
    split: tuple[int, ...] | None = None
    sources: dict[str, str] = field(default_factory=dict)

    @property
    def v(self) -> DimEntry:
        return self.h[0]

    def to_json(self) -> dict[str, Any]:
        return {
            "expr": None if self.expr is None else str(self.expr),
            "rank": self.rank,
            "chern": None if self.chern is None else chern_json(self.chern),
            "h": self.h.to_json(),
            "h_dual": self.h_dual.to_json(),
            "euler_char": self.h.euler_char,
            "globally_generated": self.globally_generated,
            "simple": self.simple,
            "split": None if self.split is None else list(self.split),
            "provenance": dict(sorted(self.sources.items())),
        }


def chern_json(c: ChernPolynomial) -> dict[str, Any]:
    def enc(x):
        return str(x) if x.denominator != 1 else int(x)

    classes = []
    for v in c.classes():
        classes.append([enc(x) for x in v] if isinstance(v, list) else enc(v))
    return {"total": str(c), "classes": classes}


class Resolver:
    """Per-variety memoized resolution of expressions."""

    def __init__(self, X: VarietySpec):
        self.X = X
        self._memo: dict = {}
        self._busy: set = set()

    # -- rank and Chern data

    def rank(self, e: Expr) -> int:
        if isinstance(e, LineBundle):
            return 1
        if isinstance(e, DirectSum):
            return sum(self.rank(t) * m for t, m in e.terms)
        if isinstance(e, (Dual, Twist)):
            return self.rank(e.inner)
        if isinstance(e, SyzygyOf):
            r = self.rank(e.inner)
            if e.w < self.X.n + r:
                raise PreconditionError(
                    f"syz({e.inner},{e.w}): need w ≥ n + r = {self.X.n} + {r} = {self.X.n + r}"
                )
            return e.w - r
        if isinstance(e, Tensor):
            return self.rank(e.left) * self.rank(e.right)
        if isinstance(e, Opaque):
            return self.X.bundle(e.name).rank
        raise StructuralError(f"not a sheaf expression: {e!r}")

    def chern(self, e: Expr) -> ChernPolynomial | None:
        key = ("c", e)
        if key not in self._memo:
            self._memo[key] = self._chern(e)
        return self._memo[key]

    def _chern(self, e: Expr) -> ChernPolynomial | None:
        ring = self.X.ring
        if ring is None:
            return None
        if isinstance(e, LineBundle):
            line = self.X.line_class(e.degree)
            return None if line is None else ChernPolynomial(one(ring) + line, 1)
        if isinstance(e, DirectSum):
            out = ChernPolynomial(one(ring), 0)
            for t, m in e.terms:
                c = self.chern(t)
                if c is None:
                    return None
                out = out * c**m
            return out
        if isinstance(e, Dual):
            c = self.chern(e.inner)
            return None if c is None else c.dual()
        if isinstance(e, Twist):
            c = self.chern(e.inner)
            line = self.X.line_class(e.n)
            if c is None or line is None:
                return None
            return chern_of_twist(c, line)
        if isinstance(e, SyzygyOf):
            c = self.chern(e.inner)
            return None if c is None else chern_invert(c, self.rank(e))
        if isinstance(e, Tensor):
            a, b = self.chern(e.left), self.chern(e.right)
            if a is None or b is None:
                return None
            return chern_from_character(chern_character(a) * chern_character(b))
        if isinstance(e, Opaque):
            b = self.X.bundle(e.name)
            if b.chern is None:
                return None
            return ChernPolynomial.from_classes(ring, list(b.chern), b.rank)
        raise StructuralError(f"not a sheaf expression: {e!r}")

    # -- cohomology tables

    def table(self, e: Expr, k: int = 0) -> CohomologyTable:
        """Table of ``e (x) O(k)``."""
        return self._cached(("t", e, k), lambda: self._table(e, k))

    def dual_table(self, e: Expr, k: int = 0) -> CohomologyTable:
        """Table of ``(e (x) O(k))^*``."""
        return self._cached(("d", e, k), lambda: self._dual_table(e, k))

    def _cached(self, key, compute) -> CohomologyTable:
        if key in self._memo:
            return self._memo[key]
        if key in self._busy:
            return CohomologyTable.unknown(self.X.n)
        self._busy.add(key)
        try:
            value = compute()
        finally:
            self._busy.discard(key)
        self._memo[key] = value
        return value

    def _table(self, e: Expr, k: int) -> CohomologyTable:
        X = self.X
        if isinstance(e, LineBundle):
            return X.line_bundle_table(e.degree + k)
        if isinstance(e, DirectSum):
            return table_sum([self.table(t, k) for t, _ in e.terms], [m for _, m in e.terms])
        if isinstance(e, Twist):
            return self.table(e.inner, k + e.n)
        if isinstance(e, Dual):
            return self.dual_table(e.inner, -k)
        if isinstance(e, SyzygyOf):
            return self._syzygy_pair(e, k)[0]
        if isinstance(e, Tensor):
            return self._tensor_table(e, k)
        if isinstance(e, Opaque):
            return self._opaque_table(e, k)
        raise StructuralError(f"not a sheaf expression: {e!r}")

    def _dual_table(self, e: Expr, k: int) -> CohomologyTable:
        X = self.X
        if isinstance(e, LineBundle):
            return X.line_bundle_table(-e.degree - k)
        if isinstance(e, DirectSum):
            return table_sum(
                [self.dual_table(t, k) for t, _ in e.terms], [m for _, m in e.terms]
            )
        if isinstance(e, Twist):
            return self.dual_table(e.inner, k + e.n)
        if isinstance(e, Dual):
            return self.table(e.inner, -k)
        if isinstance(e, SyzygyOf):
            if X.omega is None:
                return self._syzygy_dual_only(e, k)
            return self._syzygy_pair(e, k + X.omega)[1]
        if isinstance(e, Tensor):
            # (A (x) B)^* = A^* (x) B^*
            return self.table(Tensor(_dual(e.left), _dual(e.right)), -k)
        if isinstance(e, Opaque):
            return self._opaque_dual_table(e, k)
        raise StructuralError(f"not a sheaf expression: {e!r}")

    def _serre(self, t: CohomologyTable) -> CohomologyTable:
        return serre_dual_table(t, self.X.n)

    # -- syzygy bundles

    def _syzygy_seeds(self, e: SyzygyOf, k: int) -> CohomologyTable:
        """Vanishing known without the dimension chase for ``S(k)``."""
        X, F, w = self.X, e.inner, e.w
        n = X.n
        entries = [DimEntry() for _ in range(n + 1)]
        if k == 0:
            # W injects into H^0(F)
            entries[0] = exact(0)
        kernel = self._opaque_kernel(F)
        v = self.table(F)[0]
        if kernel is not None and v.exact and v.value == w:
            return self.table(kernel, k)
        if X.projective_space:
            # kernel of the complete evaluation of a 0-regular F is 1-regular
            if v.exact and v.value == w and self.is_regular(F, 0):
                for i in range(1, n + 1):
                    if k >= 1 - i:
                        entries[i] = exact(0)
        return CohomologyTable(tuple(entries))

    def _koszul_degree(self, e: SyzygyOf) -> int | None:
        """Degree ``d`` when ``S(k)`` is reachable through the Koszul complex of ``O(d)``."""
        if not self.X.projective_space or e.w <= self.X.n:
            return None
        degrees = split_degrees(e.inner)
        if degrees is not None and len(degrees) == 1 and degrees[0] > 0:
            return degrees[0]
        return None

    def _koszul_table(self, d: int, w: int, k: int) -> CohomologyTable:
        """``S(k)`` for ``S = syz(O(d), w)`` through the Koszul complex.

        ``w > n`` general sections of ``O(d)`` have no common zero, so
        ``0 -> L^w W (x) O(-(w-1)d) -> ... -> L^2 W (x) O(-d) -> S -> 0`` is
        exact (``L^j`` the exterior powers). With ``Z_j`` the image of
        ``L^{j+1} W (x) O(-jd)``, each ``0 -> Z_{j+1} -> L^{j+1} W (x) O(-jd) -> Z_j -> 0``
        is chased from ``Z_{w-1} = L^w W (x) O(-(w-1)d)`` down to ``Z_1 = S``.
        """
        X = self.X
        Z = X.line_bundle_table(k - (w - 1) * d)
        for j in range(w - 2, 0, -1):
            B = table_sum([X.line_bundle_table(k - j * d)], [comb(w, j + 1)])
            Z = les_solve(SesProblem(Z, B, CohomologyTable.unknown(X.n))).C
        return Z

    def _syzygy_pair(self, e: SyzygyOf, k: int) -> tuple[CohomologyTable, CohomologyTable]:
        """Tables of ``S(k)`` and of ``S(k - omega)^*``, solved jointly.

        ``0 -> S(k) -> W (x) O(k) -> F(k) -> 0`` feeds the first,
        ``0 -> F(j)^* -> W^* (x) O(-j) -> S(j)^* -> 0`` with ``j = k - omega``
        the second; Serre duality identifies ``h^i(S(k))`` with
        ``h^{n-i}(S(j)^*)``.
        """
        key = ("pair", e, k)
        if key in self._memo:
            return self._memo[key]
        X, F, w = self.X, e.inner, e.w
        self.rank(e)
        omega = X.omega if X.omega is not None else 0
        j = k - omega
        tS = self._syzygy_seeds(e, k)
        tD = CohomologyTable.unknown(X.n)
        p1 = SesProblem(tS, table_sum([X.line_bundle_table(k)], [w]), self.table(F, k),
                        names=(f"{e}({k})", f"W(x)O({k})", f"{F}({k})"))
        p2 = SesProblem(self.dual_table(F, j), table_sum([X.line_bundle_table(-j)], [w]), tD,
                        names=(f"{F}({j})^*", f"W^*(x)O({-j})", f"{e}({j})^*"))

        def settle(p1, p2):
            for _ in range(X.n + 2):
                p1 = les_solve(p1)
                if X.omega is not None:
                    p2 = les_solve(replace(p2, C=p2.C.meet(self._serre(p1.A), str(e))))
                    new_A = p1.A.meet(self._serre(p2.C), str(e))
                else:
                    p2 = les_solve(p2)
                    new_A = p1.A
                if new_A == p1.A:
                    break
                p1 = replace(p1, A=new_A)
            return p1, p2

        p1, p2 = settle(p1, p2)
        d = self._koszul_degree(e)
        if d is not None and not (p1.A.is_exact and p2.C.is_exact):
            # the Koszul chase is costly, so it only refines what the sequences leave open
            p1, p2 = settle(replace(p1, A=p1.A.meet(self._koszul_table(d, w, k), str(e))), p2)
        result = (p1.A, p2.C)
        self._memo[key] = result
        return result

    def _syzygy_dual_only(self, e: SyzygyOf, k: int) -> CohomologyTable:
        X, F, w = self.X, e.inner, e.w
        p = SesProblem(
            self.dual_table(F, k),
            table_sum([X.line_bundle_table(-k)], [w]),
            CohomologyTable.unknown(X.n),
        )
        return les_solve(p).C

    def is_regular(self, e: Expr, m: int) -> bool | None:
        """Castelnuovo-Mumford m-regularity, or None when a table is undecided."""
        undecided = False
        for i in range(1, self.X.n + 1):
            entry = self.table(e, m - i)[i]
            if entry.is_nonzero:
                return False
            if not entry.exact:
                undecided = True
        return None if undecided else True

    # -- tensors

    def _tensor_table(self, e: Tensor, k: int) -> CohomologyTable:
        for a, b in ((e.left, e.right), (e.right, e.left)):
            degrees = self.split(b)
            if degrees is not None:
                return table_sum([self.table(a, k + d) for d in degrees])
        if k == 0 and _is_endo(e):
            from .syzygy import endo_table_for

            return endo_table_for(_endo_base(e), self.X)
        raise UnsupportedError(
            f"tensor({e.left},{e.right}): one factor must be a sum of line bundles"
        )

    # -- opaque bundles

    def _opaque_kernel(self, e: Expr) -> Expr | None:
        if isinstance(e, Opaque):
            return self.X.bundle(e.name).kernel
        return None

    def _opaque_table(self, e: Opaque, k: int) -> CohomologyTable:
        X = self.X
        b = X.bundle(e.name)
        t = CohomologyTable.unknown(X.n)
        if k == 0 and b.h is not None:
            t = b.h
        if X.omega is not None and k == X.omega and b.h_dual is not None:
            t = t.meet(self._serre(b.h_dual), e.name)
        if b.kernel is not None and b.h is not None and b.h[0].exact:
            v = b.h[0].value
            p = SesProblem(self.table(b.kernel, k), table_sum([X.line_bundle_table(k)], [v]), t)
            t = les_solve(p).C
        return t

    def _opaque_dual_table(self, e: Opaque, k: int) -> CohomologyTable:
        X = self.X
        b = X.bundle(e.name)
        t = CohomologyTable.unknown(X.n)
        if k == 0 and b.h_dual is not None:
            t = b.h_dual
        if X.omega is not None and k + X.omega == 0 and b.h is not None:
            t = t.meet(self._serre(b.h), e.name)
        if b.kernel is not None and b.h is not None and b.h[0].exact:
            v = b.h[0].value
            p = SesProblem(t, table_sum([X.line_bundle_table(-k)], [v]), self.dual_table(b.kernel, k))
            t = les_solve(p).A
        return t

    def expand(self, e: Expr) -> Expr:
        """Replace complete syzygies of opaque bundles by their declared kernels."""
        if isinstance(e, SyzygyOf):
            kernel = self._opaque_kernel(e.inner)
            v = self.table(e.inner)[0]
            if kernel is not None and v.exact and v.value == e.w:
                return kernel
            return SyzygyOf(self.expand(e.inner), e.w)
        if isinstance(e, Dual):
            return Dual(self.expand(e.inner))
        if isinstance(e, Twist):
            return Twist(self.expand(e.inner), e.n)
        if isinstance(e, DirectSum):
            return DirectSum(tuple((self.expand(t), m) for t, m in e.terms))
        if isinstance(e, Tensor):
            return Tensor(self.expand(e.left), self.expand(e.right))
        return e

    def split(self, e: Expr) -> tuple[int, ...] | None:
        return split_degrees(self.expand(e))

    # -- flags

    def globally_generated(self, e: Expr) -> bool | None:
        degrees = self.split(e)
        if degrees is not None:
            if self.X.projective_space:
                return all(d >= 0 for d in degrees)
            if all(d == 0 for d in degrees):
                return True
            return None
        if isinstance(e, Opaque):
            return self.X.bundle(e.name).globally_generated
        if isinstance(e, Twist) and e.n >= 0 and self.X.projective_space:
            return True if self.globally_generated(e.inner) else None
        return None

    def simple(self, e: Expr) -> bool | None:
        degrees = self.split(e)
        if degrees is not None:
            # a split bundle with two summands has at least two independent endomorphisms
            return len(degrees) == 1
        if isinstance(e, (Dual, Twist)):
            return self.simple(e.inner)
        if isinstance(e, Opaque):
            b = self.X.bundle(e.name)
            return True if b.rank == 1 else b.simple
        return None

    def facts(self, e: Expr) -> BundleFacts:
        X = self.X
        rank = self.rank(e)
        chern = self.chern(e)
        h = self.table(e)
        hd = self.dual_table(e)
        degrees = self.split(e)
        kernel = self._opaque_kernel(e.inner) if isinstance(e, SyzygyOf) else None
        if isinstance(e, SyzygyOf) and kernel is not None:
            v = self.table(e.inner)[0]
            if v.exact and v.value == e.w:
                kc = self.chern(kernel)
                if self.rank(kernel) != rank or (kc is not None and chern is not None and kc != chern):
                    raise InconsistencyError(
                        f"declared kernel {kernel} disagrees with syz({e.inner},{e.w})",
                        str(e),
                        "kernel",
                    )
        if degrees is not None and len(degrees) != rank:
            raise InternalConsistencyError(f"split form of {e} has the wrong rank")
        if chern is not None and not chern.is_integral():
            raise InconsistencyError(f"Chern classes of {e} are not integral: {chern}", str(e), "chern")
        if X.ringed and chern is not None and h.euler_char is not None:
            chi = euler_char_hrr(chern, X)
            if chi != h.euler_char:
                raise InconsistencyError(
                    f"chi({e}) = {h.euler_char} from tables but {chi} by Riemann-Roch",
                    f"chi({e})",
                    "hrr",
                )
        if degrees is not None and X.projective_space:
            table_src = "closed-form"
        else:
            table_src = "solver"
        sources = {"rank": "structural", "h": table_src, "h_dual": table_src}
        if isinstance(e, Opaque):
            b = X.bundle(e.name)
            sources["h"] = "asserted" if b.h == h else "asserted+solver"
            sources["h_dual"] = "asserted" if b.h_dual == hd else "asserted+solver"

        if chern is not None:
            sources["chern"] = "structural" if not isinstance(e, Opaque) else "asserted"
        gg = self.globally_generated(e)
        simple = self.simple(e)
        if degrees is not None and simple is None:
            simple = len(degrees) == 1
        if gg is not None:
            sources["globally_generated"] = "asserted" if isinstance(e, Opaque) else "structural"
        if simple is not None:
            b = self.X.bundle(e.name) if isinstance(e, Opaque) else None
            sources["simple"] = "asserted" if b is not None and b.rank > 1 else "structural"
        return BundleFacts(e, rank, chern, h, hd, gg, simple, degrees, sources)


def _dual(e: Expr) -> Expr:
    return e.inner if isinstance(e, Dual) else Dual(e)


def _is_endo(e: Tensor) -> bool:
    return _endo_base(e) is not None


def _endo_base(e: Tensor) -> SyzygyOf | None:
    for a, b in ((e.left, e.right), (e.right, e.left)):
        if isinstance(b, Dual) and b.inner == a and isinstance(a, SyzygyOf):
            return a
    return None


_RESOLVERS: dict = {}


def resolver(X: VarietySpec) -> Resolver:
    """Shared resolver per variety value (varieties are immutable)."""
    key = id(X)
    cached = _RESOLVERS.get(key)
    if cached is None or cached[0] is not X:
        if len(_RESOLVERS) > 64:
            _RESOLVERS.clear()
        cached = (X, Resolver(X))
        _RESOLVERS[key] = cached
    return cached[1]


def facts(e: Expr | str, X: VarietySpec) -> BundleFacts:
    return resolver(X).facts(as_expr(e))


def resolve_facts(e: Expr | str, X: VarietySpec) -> BundleFacts:
    return facts(e, X)


def table(e: Expr | str, X: VarietySpec, k: int = 0) -> CohomologyTable:
    return resolver(X).table(as_expr(e), k)


def dual_table(e: Expr | str, X: VarietySpec, k: int = 0) -> CohomologyTable:
    return resolver(X).dual_table(as_expr(e), k)


def assert_global_generation(e: Expr | str, X: VarietySpec, flag: bool | None) -> BundleFacts:
    """Facts of ``e`` with global generation recorded; structural answers win and
    a conflicting assertion is a contradiction."""
    f = facts(e, X)
    auto = resolver(X).globally_generated(f.expr)
    if auto is not None and not isinstance(f.expr, Opaque):
        if flag is not None and flag != auto:
            raise InconsistencyError(
                f"{f.expr} is {'not ' if not auto else ''}globally generated, assertion says otherwise",
                str(f.expr),
                "global generation",
            )
        return f
    if flag is not None:
        f.globally_generated = flag
        f.sources["globally_generated"] = "asserted"
    return f
