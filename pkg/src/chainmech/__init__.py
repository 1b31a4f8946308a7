"""Altruist-initiated donation chains in a semi-random compatibility-graph model."""

from .benchmarks import BENCHMARKS, avgopt, longest_path, opt, pi_ir, sopt
from .errors import ExactSearchBudgetError, GeneratorError, InstanceError, InvariantViolation, PreconditionViolated
from .graph_core import (
    CompatibilityGraph,
    Instance,
    PathSet,
    Report,
    ViewGraph,
    sample_random_edges,
    segments,
    utilities,
    utility,
    view,
    welfare,
)
from .incentives import audit_hiding, best_diversion, ir_check, monte_carlo
from .mechanism_avg import run_mechanism_avg
from .mechanism_s import run_mechanism_s
from .mechanisms import check_outcome, make_mechanism
from .outcome import MechanismOutcome
from .stitching import arrange_alternating, stitch

__all__ = [
    "BENCHMARKS", "CompatibilityGraph", "ExactSearchBudgetError", "GeneratorError", "Instance",
    "InstanceError", "InvariantViolation", "MechanismOutcome", "PathSet", "PreconditionViolated", "Report",
    "ViewGraph", "arrange_alternating", "audit_hiding", "avgopt", "best_diversion", "check_outcome", "ir_check",
    "longest_path", "make_mechanism", "monte_carlo", "opt", "pi_ir", "run_mechanism_avg", "run_mechanism_s",
    "sample_random_edges", "segments", "sopt", "stitch", "utilities", "utility", "view", "welfare",
]
