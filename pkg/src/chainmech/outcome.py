"""Mechanism outcomes, their traces, and structural validation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

from .graph_core import Digraph, Instance, Path, is_valid_path, utilities

SUCCESS = "success"
FAILURE = "failure"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class MechanismOutcome:
    """Result of one mechanism run.

    ``branch`` names the exit taken (for example ``"trivial"`` or
    ``"stitch1"``); ``trace`` is the ordered list of decision events, each a
    JSON-compatible dict with an ``"event"`` key.
    """

    mechanism: str
    status: str
    path: Path
    branch: str
    params: dict
    trace: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def success(self) -> bool:
        return self.status == SUCCESS

    @property
    def welfare(self) -> int:
        return len(self.path)

    def utilities(self, instance: Instance) -> list[int]:
        return utilities(self.path, instance)

    def events(self, name: str) -> Iterator[dict]:
        return (e for e in self.trace if e["event"] == name)

    def event(self, name: str) -> Optional[dict]:
        return next(self.events(name), None)

    def trace_digest(self) -> str:
        return digest(list(self.trace))

    def record(self, instance: Instance) -> dict:
        return {
            "mechanism": self.mechanism,
            "status": self.status,
            "branch": self.branch,
            "path": list(self.path),
            "welfare": self.welfare,
            "utilities": self.utilities(instance),
            "params": self.params,
            "trace_digest": self.trace_digest(),
        }


def structural_violations(outcome: MechanismOutcome, graph: Digraph) -> list[str]:
    """Checks every outcome must pass regardless of mechanism."""
    out = []
    if not is_valid_path(outcome.path, graph, start=graph.altruist):
        out.append(f"path {outcome.path} is not a simple altruist path of the graph")
    if outcome.status not in (SUCCESS, FAILURE):
        out.append(f"unknown status {outcome.status!r}")
    return out
