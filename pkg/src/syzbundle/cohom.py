"""Cohomology dimension tables and the long exact sequence dimension chase.

Entries are tri-state: exactly known, bounded below, or unknown. Upper bounds
only ever appear transiently inside :func:`les_solve`, where they are derived
from exact neighbours; anything that survives is stored as a lower bound or
promoted to an exact value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .errors import InconsistencyError, InternalConsistencyError, StructuralError

_INF = math.inf  # sentinel for "no upper bound"; finite bounds are always ints


@dataclass(frozen=True)
class DimEntry:
    """A dimension ``h^i``: exact when ``exact`` is set, otherwise ``>= lo``."""

    lo: int = 0
    exact: bool = False

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError("dimensions are non-negative")

    @property
    def kind(self) -> str:
        if self.exact:
            return "exact"
        return "at_least" if self.lo > 0 else "unknown"

    @property
    def value(self) -> int:
        if not self.exact:
            raise ValueError(f"{self} is not an exact value")
        return self.lo

    @property
    def is_zero(self) -> bool:
        return self.exact and self.lo == 0

    @property
    def is_nonzero(self) -> bool:
        return self.lo > 0

    def meet(self, other: DimEntry, slot: str = "entry") -> DimEntry:
        """Combine two pieces of information about the same dimension."""
        if self.exact and other.exact:
            if self.lo != other.lo:
                raise InconsistencyError(
                    f"{slot}: exact values {self.lo} and {other.lo} disagree", slot, "meet"
                )
            return self
        if self.exact or other.exact:
            ex, bound = (self, other) if self.exact else (other, self)
            if bound.lo > ex.lo:
                raise InconsistencyError(
                    f"{slot}: exact value {ex.lo} below lower bound {bound.lo}", slot, "meet"
                )
            return ex
        return self if self.lo >= other.lo else other

    def refines(self, other: DimEntry) -> bool:
        """True when ``self`` carries at least the information of ``other``."""
        if other.exact:
            return self.exact and self.lo == other.lo
        return self.lo >= other.lo

    def admits(self, value: int) -> bool:
        return value == self.lo if self.exact else value >= self.lo

    def to_json(self):
        if self.exact:
            return self.lo
        return f">={self.lo}" if self.lo > 0 else "?"

    @classmethod
    def parse(cls, raw) -> DimEntry:
        if isinstance(raw, DimEntry):
            return raw
        if raw is None or raw == "?":
            return UNKNOWN
        if isinstance(raw, bool):
            raise ValueError(f"bad dimension entry {raw!r}")
        if isinstance(raw, int):
            return exact(raw)
        if isinstance(raw, str):
            text = raw.strip().replace("≥", ">=")
            if text.startswith(">="):
                return at_least(int(text[2:]))
            return exact(int(text))
        raise ValueError(f"bad dimension entry {raw!r}")

    def __str__(self) -> str:
        if self.exact:
            return str(self.lo)
        return f"≥{self.lo}" if self.lo > 0 else "?"


def exact(k: int) -> DimEntry:
    return DimEntry(int(k), True)


def at_least(m: int) -> DimEntry:
    return DimEntry(max(int(m), 0), False)


UNKNOWN = DimEntry(0, False)


@dataclass(frozen=True)
class CohomologyTable:
    """``h^0 .. h^n`` of a sheaf on an n-dimensional variety, plus optional chi."""

    entries: tuple[DimEntry, ...]
    euler_char: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(DimEntry.parse(e) for e in self.entries))
        if not self.entries:
            raise StructuralError("a cohomology table needs at least h^0")
        alt = self.alternating_sum()
        if self.euler_char is None and alt is not None:
            object.__setattr__(self, "euler_char", alt)
        elif alt is not None and alt != self.euler_char:
            raise InconsistencyError(
                f"euler characteristic {self.euler_char} disagrees with entries {self}",
                "chi",
                "table",
            )

    @classmethod
    def of(cls, *values, euler_char: int | None = None) -> CohomologyTable:
        return cls(tuple(DimEntry.parse(v) for v in values), euler_char)

    @classmethod
    def unknown(cls, n: int) -> CohomologyTable:
        return cls((UNKNOWN,) * (n + 1))

    @classmethod
    def zero(cls, n: int) -> CohomologyTable:
        return cls((exact(0),) * (n + 1))

    @property
    def dim(self) -> int:
        return len(self.entries) - 1

    def __getitem__(self, i: int) -> DimEntry:
        if i < 0:
            raise IndexError(i)
        if i > self.dim:
            # h^{n+1} and above vanish on an n-dimensional variety
            return exact(0)
        return self.entries[i]

    def __len__(self) -> int:
        return len(self.entries)

    def alternating_sum(self) -> int | None:
        if not all(e.exact for e in self.entries):
            return None
        return sum((-1) ** i * e.lo for i, e in enumerate(self.entries))

    @property
    def is_exact(self) -> bool:
        return all(e.exact for e in self.entries)

    def values(self) -> tuple[int, ...]:
        return tuple(e.value for e in self.entries)

    def meet(self, other: CohomologyTable, name: str = "table") -> CohomologyTable:
        if other.dim != self.dim:
            raise StructuralError("tables of different lengths")
        entries = tuple(
            a.meet(b, f"h^{i}({name})") for i, (a, b) in enumerate(zip(self.entries, other.entries))
        )
        chi = self.euler_char
        if other.euler_char is not None:
            if chi is not None and chi != other.euler_char:
                raise InconsistencyError(
                    f"chi({name}): {chi} vs {other.euler_char}", f"chi({name})", "meet"
                )
            chi = other.euler_char
        return CohomologyTable(entries, chi)

    def with_entry(self, i: int, entry: DimEntry) -> CohomologyTable:
        entries = list(self.entries)
        entries[i] = entry
        return CohomologyTable(tuple(entries), self.euler_char)

    def refines(self, other: CohomologyTable) -> bool:
        return all(a.refines(b) for a, b in zip(self.entries, other.entries)) and (
            other.euler_char is None or self.euler_char == other.euler_char
        )

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


def line_bundle_cohom_pn(n: int, d: int) -> CohomologyTable:
    """Closed-form cohomology of ``O(d)`` on P^n (Bott)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    vals = [0] * (n + 1)
    if d >= 0:
        vals[0] = comb(n + d, n)
    if d <= -n - 1:
        vals[n] = comb(-d - 1, n)
    return CohomologyTable(tuple(exact(v) for v in vals))


def serre_dual_table(t: CohomologyTable, n: int | None = None) -> CohomologyTable:
    """Given the table of ``E* (x) omega``, return the table of ``E``.

    ``h^i(E) = h^{n-i}(E* (x) omega)``; chi picks up the sign ``(-1)^n``.
    """
    n = t.dim if n is None else n
    if n != t.dim:
        raise StructuralError(f"table has length {len(t)}, expected {n + 1}")
    chi = None if t.euler_char is None else (-1) ** n * t.euler_char
    return CohomologyTable(tuple(reversed(t.entries)), chi)


def table_sum(
    tables: Sequence[CohomologyTable], multiplicities: Iterable[int] | None = None
) -> CohomologyTable:
    """Entrywise weighted sum; an unknown summand makes the entry unknown."""
    tables = list(tables)
    mults = [1] * len(tables) if multiplicities is None else list(multiplicities)
    if not tables:
        raise StructuralError("empty direct sum")
    n = tables[0].dim
    if any(t.dim != n for t in tables) or len(mults) != len(tables):
        raise StructuralError("direct sum of tables of different lengths")
    entries = []
    for i in range(n + 1):
        terms = [(t[i], m) for t, m in zip(tables, mults) if m]
        if any(e.kind == "unknown" for e, _ in terms):
            entries.append(UNKNOWN)
        elif all(e.exact for e, _ in terms):
            entries.append(exact(sum(e.lo * m for e, m in terms)))
        else:
            entries.append(at_least(sum(e.lo * m for e, m in terms)))
    chis = [t.euler_char for t, m in zip(tables, mults) if m]
    chi = None if any(c is None for c in chis) else sum(c * m for c, m in zip(chis, [m for m in mults if m]))
    return CohomologyTable(tuple(entries), chi)


def scale_table(t: CohomologyTable, m: int) -> CohomologyTable:
    return table_sum([t], [m])


@dataclass(frozen=True)
class SesProblem:
    """Tables of a short exact sequence ``0 -> A -> B -> C -> 0``."""

    A: CohomologyTable
    B: CohomologyTable
    C: CohomologyTable
    names: tuple[str, str, str] = field(default=("A", "B", "C"))

    def __post_init__(self):
        if not (self.A.dim == self.B.dim == self.C.dim):
            raise StructuralError("tables of a short exact sequence must have equal length")

    @property
    def dim(self) -> int:
        return self.A.dim

    def tables(self) -> tuple[CohomologyTable, CohomologyTable, CohomologyTable]:
        return self.A, self.B, self.C

    def refines(self, other: SesProblem) -> bool:
        return all(x.refines(y) for x, y in zip(self.tables(), other.tables()))


class _Chase:
    """Bound propagation over the long exact sequence of one SES."""

    def __init__(self, p: SesProblem):
        self.p = p
        self.n = p.dim
        self.size = 3 * (self.n + 1)
        self.lo: list[int] = []
        self.hi: list[float] = []
        for i in range(self.n + 1):
            for t in p.tables():
                e = t[i]
                self.lo.append(e.lo)
                self.hi.append(e.lo if e.exact else _INF)
        self.chi: list[int | None] = [t.euler_char for t in p.tables()]
        self.changed = False

    def slot(self, pos: int) -> str:
        i, t = divmod(pos, 3)
        return f"h^{i}({self.p.names[t]})"

    def _raise_lo(self, pos: int, value, rule: str) -> None:
        if value == -_INF or value <= self.lo[pos]:
            return
        value = int(value)
        if value > self.hi[pos]:
            raise InconsistencyError(
                f"{self.slot(pos)}: rule '{rule}' forces >= {value} but value is at most {self.hi[pos]}",
                self.slot(pos),
                rule,
            )
        self.lo[pos] = value
        self.changed = True

    def _lower_hi(self, pos: int, value, rule: str) -> None:
        if value >= self.hi[pos]:
            return
        if value < self.lo[pos]:
            raise InconsistencyError(
                f"{self.slot(pos)}: rule '{rule}' forces <= {value} but value is at least {self.lo[pos]}",
                self.slot(pos),
                rule,
            )
        self.hi[pos] = int(value)
        self.changed = True

    def _val(self, pos: int) -> tuple[int, float]:
        if 0 <= pos < self.size:
            return self.lo[pos], self.hi[pos]
        return 0, 0  # H^{-1} and H^{n+1} vanish

    def _propagate_equation(self, coeffs: dict[int, int], rhs: int, rule: str) -> None:
        """Interval propagation on ``sum coeffs[p] * x_p = rhs`` with +-1 coefficients."""
        for j, aj in coeffs.items():
            rest_min = 0
            rest_max = 0
            for i, ai in coeffs.items():
                if i == j:
                    continue
                lo, hi = self._val(i)
                if ai > 0:
                    rest_min += lo
                    rest_max += hi
                else:
                    rest_min -= hi
                    rest_max -= lo
            if aj > 0:
                self._raise_lo(j, rhs - rest_max, rule)
                self._lower_hi(j, rhs - rest_min, rule)
            else:
                self._raise_lo(j, rest_min - rhs, rule)
                self._lower_hi(j, rest_max - rhs, rule)

    def _euler(self) -> None:
        for t in range(3):
            positions = [3 * i + t for i in range(self.n + 1)]
            if all(self.lo[p] == self.hi[p] for p in positions):
                alt = sum((-1) ** i * self.lo[p] for i, p in enumerate(positions))
                if self.chi[t] is None:
                    self.chi[t] = alt
                    self.changed = True
                elif self.chi[t] != alt:
                    raise InconsistencyError(
                        f"chi({self.p.names[t]}) = {self.chi[t]} but entries sum to {alt}",
                        f"chi({self.p.names[t]})",
                        "euler characteristic",
                    )
        a, b, c = self.chi
        known = [x is not None for x in self.chi]
        if all(known):
            if b != a + c:
                raise InconsistencyError(
                    f"chi additivity fails: {b} != {a} + {c}", "chi", "chi additivity"
                )
        elif sum(known) == 2:
            if a is None:
                self.chi[0] = b - c
            elif b is None:
                self.chi[1] = a + c
            else:
                self.chi[2] = b - a
            self.changed = True
        for t in range(3):
            if self.chi[t] is not None:
                coeffs = {3 * i + t: (-1) ** i for i in range(self.n + 1)}
                self._propagate_equation(coeffs, self.chi[t], "euler characteristic")

    def _segments(self) -> None:
        zero = [self.lo[p] == 0 and self.hi[p] == 0 for p in range(self.size)]
        start = 0
        for p in range(self.size + 1):
            if p == self.size or zero[p]:
                if p > start:
                    coeffs = {q: (-1) ** q for q in range(start, p)}
                    self._propagate_equation(coeffs, 0, "segment alternating sum")
                start = p + 1

    def _neighbours(self) -> None:
        for p in range(self.size):
            plo, phi = self._val(p)
            llo, lhi = self._val(p - 1)
            rlo, rhi = self._val(p + 1)
            self._lower_hi(p, lhi + rhi, "sub/quotient bound")
            if p - 1 >= 0:
                self._raise_lo(p - 1, plo - rhi, "sub/quotient bound")
            if p + 1 < self.size:
                self._raise_lo(p + 1, plo - lhi, "sub/quotient bound")

    def run(self) -> SesProblem:
        cap = (3 * (self.n + 1)) ** 2
        rounds = 0
        self.changed = True
        while self.changed:
            rounds += 1
            if rounds > cap:
                raise InternalConsistencyError(
                    f"dimension chase did not reach a fixpoint in {cap} rounds"
                )
            self.changed = False
            self._euler()
            self._segments()
            self._neighbours()
        tables = []
        for t in range(3):
            entries = []
            for i in range(self.n + 1):
                p = 3 * i + t
                if self.lo[p] == self.hi[p]:
                    entries.append(exact(self.lo[p]))
                else:
                    entries.append(at_least(self.lo[p]))
            tables.append(CohomologyTable(tuple(entries), self.chi[t]))
        return SesProblem(*tables, names=self.p.names)


def les_solve(p: SesProblem) -> SesProblem:
    """Refine all three tables of a short exact sequence to a fixpoint.

    Rules: chi additivity; vanishing alternating sums on every stretch of the
    long exact sequence bounded by two exact zeros (and by the ends); and the
    three-term bounds ``dim Y <= dim X + dim Z`` around every entry. A
    contradiction raises :class:`InconsistencyError` naming the slot and rule.
    """
    return _Chase(p).run()
