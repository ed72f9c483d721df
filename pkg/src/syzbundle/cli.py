"""Command-line interface: ``syzbundle <command> [options]``.

Exit codes: 0 success, 1 usage/parse/precondition error, 2 verdict blocked by
undetermined data, 3 contradiction, 4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from .errors import (
    InconsistencyError,
    InternalConsistencyError,
    ParseError,
    PreconditionError,
    StructuralError,
    SyzError,
    UnknownBlocked,
    UnsupportedError,
)
from .expr import parse_expr
from .moduli import ModuliReport, moduli_report
from .sheaf import BundleFacts, VarietySpec, catalog, facts, load_input
from .syzygy import SyzygyResult, build_syzygy, reconstruct_check
from .tower import TowerPolicy, TowerRun, tower_run

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN, EXIT_CONTRADICTION, EXIT_INTERNAL = 0, 1, 2, 3, 4

EXIT_CODES = {
    ParseError: EXIT_USAGE,
    PreconditionError: EXIT_USAGE,
    StructuralError: EXIT_USAGE,
    UnknownBlocked: EXIT_UNKNOWN,
    UnsupportedError: EXIT_UNKNOWN,
    InconsistencyError: EXIT_CONTRADICTION,
    InternalConsistencyError: EXIT_INTERNAL,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="syzbundle", description="Syzygy bundles, their cohomology and moduli counts.")
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def common(sp, bundle: bool = True, w: bool = False):
        sp.add_argument("--variety", default=None, help="P2, P3, P4, CY3-quintic, or custom (with --input)")
        sp.add_argument("--input", default=None, metavar="FILE", help="JSON file with a variety and/or bundles")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        if bundle:
            sp.add_argument("--bundle", required=True, help='bundle expression, e.g. "syz(O(3),3)"')
        if w:
            sp.add_argument("-w", type=int, required=True, help="dimension of the space of sections W")

    common(sub.add_parser("describe", help="rank, Chern classes and cohomology of a bundle"))
    common(sub.add_parser("syzygy", help="membership and syzygy-bundle verdicts"), w=True)
    common(sub.add_parser("moduli", help="moduli dimension counts"), w=True)
    tw = sub.add_parser("tower", help="iterate the syzygy construction")
    common(tw, bundle=False)
    tw.add_argument("--start", required=True, help="starting bundle expression")
    tw.add_argument("--policy", choices=("full", "fixed", "max-grassmann"), default="full")
    tw.add_argument("--k", type=int, default=None, help="w for --policy fixed")
    tw.add_argument("--steps", type=int, default=1)
    tw.add_argument("--require-V", dest="require_V", action="store_true")
    tw.add_argument("--scan-cap", dest="scan_cap", type=int, default=50)
    vp = sub.add_parser("verify-paper", help="recompute the reference numbers of the worked examples")
    vp.add_argument("--format", choices=("text", "json"), default="text")
    return p


def load_variety(name: str | None, input_file: str | None) -> VarietySpec:
    if input_file is None:
        return catalog(name or "P2")
    if name in (None, "custom", "custom-from-file"):
        try:
            return load_input(input_file)
        except StructuralError as exc:
            if name is None and "no 'dim'" in str(exc):
                return load_input(input_file, catalog("P2"))
            raise
    return load_input(input_file, catalog(name))


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed indentation, no floats."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


# ------------------------------------------------------------ text rendering


def _facts_text(f: BundleFacts, label: str = "") -> list[str]:
    lines = [f"{label}{f.expr}" if label else f"bundle: {f.expr}"]
    lines.append(f"  rank: {f.rank}")
    if f.chern is not None:
        lines.append(f"  chern: {f.chern}  [{f.sources.get('chern', '')}]")
    lines.append(f"  h:      {f.h}  chi = {f.h.euler_char}  [{f.sources.get('h')}]")
    lines.append(f"  h_dual: {f.h_dual}  [{f.sources.get('h_dual')}]")
    if f.split is not None:
        lines.append("  split: " + " + ".join(f"O({d})" for d in f.split))
    for flag in ("globally_generated", "simple"):
        value = getattr(f, flag)
        shown = "unknown" if value is None else str(value).lower()
        src = f" [{f.sources[flag]}]" if flag in f.sources else ""
        lines.append(f"  {flag.replace('_', ' ')}: {shown}{src}")
    return lines


def _tri(value: bool | None) -> str:
    return "unknown" if value is None else str(value).lower()


def _syzygy_text(r: SyzygyResult) -> list[str]:
    lines = _facts_text(r.F, "F: ")
    lines.append(f"w = {r.w}")
    lines.append(f"in U: {_tri(r.membership.in_U)}    in V: {_tri(r.membership.in_V)}")
    for fs in r.membership.blocking_facts:
        lines.append(f"  {fs.condition:<20} {fs.status:<8} [{fs.source}]")
    lines += _facts_text(r.S, "S: ")
    lines.append(f"simple: {_tri(r.simple)} [{r.provenance.get('simple', 'unknown')}]")
    lines.append(f"h^0(S) = {r.h0_S} [{r.provenance['h0_S']}]   h^0(S*) = {r.h0_Sdual} [{r.provenance['h0_Sdual']}]")
    lines.append(f"embedding: {r.embedding.value}")
    lines += [f"  {reason}" for reason in r.reasons]
    lines += [f"note: {note}" for note in r.notes]
    return lines


def _moduli_text(m: ModuliReport) -> list[str]:
    src = m.provenance
    rows = [
        ("Grassmann fiber w(v-w)", m.dim_G0_fiber, "dim_G0_fiber"),
        ("ext^1(F,F)", m.dim_U_tangent_at_F, "dim_U_tangent_at_F"),
        ("tangent of pair space (geometric)", m.dim_G0_tangent, "dim_G0_tangent"),
        ("tangent of pair space (quotient)", m.dim_G0_tangent_quot, "dim_G0_tangent_quot"),
        ("ext^1(S,S)", m.tangent_Spl_S, "tangent_Spl_S"),
        ("ext^2(S,S)", m.obstruction_Spl_S, "obstruction_Spl_S"),
        ("dim Spl at S", m.dim_Spl_at_S, "dim_Spl_at_S"),
        ("dim syzygy locus", m.dim_syz, "dim_syz"),
        ("codim syzygy locus", m.codim_syz, "codim_syz"),
        ("h^2(S (x) F*)", m.normal_fiber_dim, "normal_fiber_dim"),
    ]
    lines = [f"{name:<36} {'?' if v is None else v}  [{src.get(key, 'solver')}]" for name, v, key in rows]
    if m.hrr_dim is not None:
        if m.hrr_dim.refused:
            lines.append(f"{'1 - chi(End S)':<36} refused: {m.hrr_dim.refused}")
        else:
            lines.append(f"{'1 - chi(End S)':<36} {m.hrr_dim.value}  (chi = {m.hrr_dim.euler_char}) [hrr]")
    lines.append(f"convention: {m.convention_note}")
    lines += [f"note: {n}" for n in m.notes]
    return lines


def _tower_text(run: TowerRun) -> list[str]:
    lines = [f"{'step':>4} {'input':<44} {'N':>3} {'reg':>4} {'w':>5} {'rank S':>6}  {'c(S)':<28} {'ext1(S,S)':>9}  embedding"]
    for s in run.steps:
        lines.append(
            f"{s.index:>4} {str(s.input_bundle):<44} {s.twist_applied:>3} "
            f"{'-' if s.regularity is None else s.regularity:>4} {s.chosen_w:>5} {s.S_facts.rank:>6}  "
            f"{str(s.S_facts.chern or '?'):<28} {str(s.moduli.tangent_Spl_S):>9}  {s.syzygy.embedding.value}"
        )
    lines.append(f"status: {run.status}" + (f" ({run.reason})" if run.reason else ""))
    return lines


# ------------------------------------------------------------------ commands


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.format == "json":
        print(dumps(payload))
    else:
        print("\n".join(lines))


def cmd_describe(args) -> int:
    X = load_variety(args.variety, args.input)
    f = facts(parse_expr(args.bundle), X)
    _emit(args, {"variety": X.name, "facts": f.to_json()}, [f"variety: {X.name}"] + _facts_text(f))
    return EXIT_OK


def cmd_syzygy(args) -> int:
    X = load_variety(args.variety, args.input)
    r = build_syzygy(parse_expr(args.bundle), args.w, X)
    rec = reconstruct_check(r)
    payload = {"variety": X.name, "result": r.to_json(), "reconstruction": rec.to_json()}
    lines = [f"variety: {X.name}"] + _syzygy_text(r)
    if rec.refused:
        lines.append(f"reconstruction: refused ({rec.refused})")
    else:
        lines.append("reconstruction: " + ", ".join(f"{c.name} {'ok' if c.passed else 'FAILED'}" for c in rec.checks))
    _emit(args, payload, lines)
    if r.membership.in_U is None:
        print("verdict blocked: membership in U depends on undetermined facts", file=sys.stderr)
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_moduli(args) -> int:
    X = load_variety(args.variety, args.input)
    F = parse_expr(args.bundle)
    r = build_syzygy(F, args.w, X)
    m = moduli_report(F, args.w, X, r)
    payload = {"variety": X.name, "bundle": str(F), "w": args.w, "in_U": r.membership.in_U,
               "in_V": r.membership.in_V, "moduli": m.to_json()}
    lines = [f"variety: {X.name}   F = {F}   w = {args.w}",
             f"in U: {_tri(r.membership.in_U)}   in V: {_tri(r.membership.in_V)}"] + _moduli_text(m)
    _emit(args, payload, lines)
    if r.membership.in_U is None:
        print("verdict blocked: membership in U depends on undetermined facts", file=sys.stderr)
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_tower(args) -> int:
    X = load_variety(args.variety, args.input)
    policy = TowerPolicy(args.policy, args.k, args.steps, args.require_V, args.scan_cap)
    run = tower_run(X, parse_expr(args.start), policy)
    _emit(args, {"variety": X.name, "start": args.start, "tower": run.to_json()}, _tower_text(run))
    if run.blocked_by_unknown:
        print(f"tower blocked: {run.reason}", file=sys.stderr)
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_verify(args) -> int:
    from .golden import verify

    results = verify()
    if args.format == "json":
        print(dumps([{"check": row.name, "expected": row.expected, "computed": got, "pass": ok}
                     for row, got, ok in results]))
    else:
        width = max(len(row.name) for row, _, _ in results)
        for row, got, ok in results:
            print(f"{'PASS' if ok else 'FAIL'}  {row.name:<{width}}  expected {row.expected:<24} computed {got}")
        failed = [row.name for row, _, ok in results if not ok]
        print(f"{len(results) - len(failed)}/{len(results)} passed")
        if failed:
            print("failures: " + "; ".join(failed))
    return EXIT_OK if all(ok for _, _, ok in results) else EXIT_USAGE


COMMANDS = {
    "describe": cmd_describe,
    "syzygy": cmd_syzygy,
    "moduli": cmd_moduli,
    "tower": cmd_tower,
    "verify-paper": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except SyzError as exc:
        code = next((c for cls, c in EXIT_CODES.items() if isinstance(exc, cls)), EXIT_USAGE)
        print(f"error: {exc}", file=sys.stderr)
        return code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
