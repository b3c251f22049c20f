"""Simulation and exact analysis of degree-sequence-driven graph growth."""

from .analysis import (
    RadocityReport,
    Verdict,
    WitnessQuery,
    count_witnesses,
    falling_factorial,
    generalized_witness_probability,
    no_witness_tail_probability,
    radocity_series,
    term_equivalence_check,
    witness_probability,
)
from .components import ComponentTracker, ExpectationTable, expectation_table, recursion_bounds_check
from .engine import GrowthGraph, ProcessRng, count_triangles, grow, sample_uniform_subset
from .experiments import ExperimentPlan, run
from .harness import BudgetExceeded, ExperimentReport
from .sequence import (
    DegreeSequence,
    SeriesLedger,
    build_triangle_construction,
    degree,
    ledger,
    parse_sequence,
)
from .series import (
    FamilySpec,
    enumerate_family,
    f_weight,
    family_weight_sum,
    injectivity_defect_bound_check,
    rearrangement_identity_check,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "ComponentTracker",
    "DegreeSequence",
    "ExpectationTable",
    "ExperimentPlan",
    "ExperimentReport",
    "FamilySpec",
    "GrowthGraph",
    "ProcessRng",
    "RadocityReport",
    "SeriesLedger",
    "Verdict",
    "WitnessQuery",
    "build_triangle_construction",
    "count_triangles",
    "count_witnesses",
    "degree",
    "enumerate_family",
    "expectation_table",
    "f_weight",
    "falling_factorial",
    "family_weight_sum",
    "generalized_witness_probability",
    "grow",
    "injectivity_defect_bound_check",
    "ledger",
    "no_witness_tail_probability",
    "parse_sequence",
    "radocity_series",
    "rearrangement_identity_check",
    "recursion_bounds_check",
    "run",
    "sample_uniform_subset",
    "term_equivalence_check",
    "witness_probability",
]
