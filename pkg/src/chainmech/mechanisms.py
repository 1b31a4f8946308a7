"""Name-based access to the mechanisms, with picklable bound parameters."""

from __future__ import annotations

from functools import partial
from typing import Optional

from .graph_core import Digraph
from .mechanism_avg import invariant_violations as _avg_violations
from .mechanism_avg import run_mechanism_avg
from .mechanism_s import invariant_violations as _s_violations
from .mechanism_s import run_mechanism_s
from .outcome import MechanismOutcome, structural_violations

MECHANISMS = {"s": run_mechanism_s, "avg": run_mechanism_avg}


def make_mechanism(name: str, s: int, f: Optional[int] = None, n_min: int = 1, limit: Optional[int] = None):
    try:
        fn = MECHANISMS[name]
    except KeyError:
        raise ValueError(f"unknown mechanism {name!r}; choose from {sorted(MECHANISMS)}") from None
    return partial(fn, s=s, f=f, n_min=n_min, limit=limit)


def check_outcome(outcome: MechanismOutcome, graph: Digraph) -> list[str]:
    """All structural and mechanism-specific invariant violations of a run on ``graph``."""
    out = structural_violations(outcome, graph)
    if outcome.mechanism == "mechanism_s":
        out += _s_violations(outcome, graph)
    elif outcome.mechanism == "mechanism_avg":
        out += _avg_violations(outcome, graph)
    return out
