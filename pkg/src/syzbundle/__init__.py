"""Generalized syzygy bundles: Chern calculus, cohomology dimension chasing,
membership verdicts and moduli dimension counts."""

from .cohom import CohomologyTable, DimEntry, SesProblem, les_solve, line_bundle_cohom_pn, serre_dual_table, table_sum
from .expr import parse_expr
from .moduli import grassmann_dim, lemma_formulas, moduli_report
from .ring import ChernPolynomial, chern_invert, projective_ring
from .sheaf import BundleFacts, VarietySpec, catalog, facts, load_input, resolve_facts
from .syzygy import build_syzygy, check_membership, endo_cohomology, reconstruct_check
from .tower import TowerPolicy, cm_regularity, tower_run

__all__ = [
    "BundleFacts", "ChernPolynomial", "CohomologyTable", "DimEntry", "SesProblem", "TowerPolicy",
    "VarietySpec", "build_syzygy", "catalog", "check_membership", "chern_invert", "cm_regularity",
    "endo_cohomology", "facts", "grassmann_dim", "lemma_formulas", "les_solve", "line_bundle_cohom_pn",
    "load_input", "moduli_report", "parse_expr", "projective_ring", "reconstruct_check",
    "resolve_facts", "serre_dual_table", "table_sum", "tower_run",
]
