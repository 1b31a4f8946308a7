"""Manipulation audits: hiding nodes, diverting the chain, or both.

All comparisons are coupled: the truthful and manipulated reports are
evaluated against the same realized compatibility graph.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .benchmarks import longest_internal_path, pi_ir, sopt
from .graph_core import CompatibilityGraph, Digraph, Instance, Path, Report, sample_random_edges, utility, view
from .outcome import SUCCESS, MechanismOutcome

Mechanism = Callable[[Digraph], MechanismOutcome]


def best_diversion(graph: Digraph, path: Path, hospital: int, limit: Optional[int] = None) -> Path:
    """Best continuation for ``hospital`` when it may cut the chain at one of its nodes.

    At each of its nodes on ``path`` the hospital may abandon the rest of the
    chain and continue with its longest internal path in ``graph`` (the true
    graph, hidden nodes included) that avoids the earlier part of the chain.
    Returns ``path`` itself when no diversion is strictly better.
    """
    owners = graph.instance.owners
    best, best_u = tuple(path), utility(path, hospital, graph.instance)
    before = 0
    for k, v in enumerate(path):
        if owners[v] != hospital:
            continue
        tail = longest_internal_path(graph, hospital, v, forbidden=path[:k], limit=limit)
        u = before + len(tail)
        if u > best_u:
            best, best_u = tuple(path[:k]) + tail, u
        before += 1
    return best


def divert_node(original: Path, diverted: Path) -> Optional[int]:
    """Node after which ``diverted`` leaves ``original`` (``None`` when they coincide)."""
    if tuple(original) == tuple(diverted):
        return None
    j = next((k for k, (x, y) in enumerate(zip(original, diverted)) if x != y), min(len(original), len(diverted)))
    return diverted[j - 1]


def welfare_max_baseline(graph: Digraph, s: int, limit: Optional[int] = None) -> MechanismOutcome:
    """Naive reference mechanism: always return the longest path whose segments all have ``s`` nodes."""
    path = sopt(graph, s, limit).path
    return MechanismOutcome("welfare_max", SUCCESS, path, "optimal", {"s": s})


def hiding_subsets(
    candidates: Sequence[int], exhaustive_max: int = 12, samples: int = 256, seed: int = 0
) -> tuple[Iterator[frozenset[int]], bool]:
    """All subsets of ``candidates`` when small enough, otherwise a seeded sample (always with the empty set)."""
    cand = sorted(candidates)
    if len(cand) <= exhaustive_max:
        it = (frozenset(c) for r in range(len(cand) + 1) for c in itertools.combinations(cand, r))
        return it, True
    rng = random.Random(seed)

    def sample() -> Iterator[frozenset[int]]:
        yield frozenset()
        for _ in range(samples):
            yield frozenset(v for v in cand if rng.random() < 0.5)

    return sample(), False


@dataclass
class AuditReport:
    hospital: int
    truthful_utility: int
    truthful_diverted_utility: int
    best_hiding_utility: int
    best_hiding_set: tuple[int, ...]
    best_total_utility: int
    best_total_set: tuple[int, ...]
    best_total_path: Path
    best_total_divert: Optional[int]
    subsets_checked: int
    exhaustive: bool
    outcomes: list[tuple[tuple[int, ...], MechanismOutcome]] = field(default_factory=list, repr=False)

    @property
    def gap_ratio(self) -> float:
        return self.best_total_utility / max(self.truthful_utility, 1)

    @property
    def hiding_gain(self) -> int:
        return self.best_hiding_utility - self.truthful_utility

    def record(self) -> dict:
        return {
            "hospital": self.hospital,
            "truthful_utility": self.truthful_utility,
            "truthful_diverted_utility": self.truthful_diverted_utility,
            "best_hiding_utility": self.best_hiding_utility,
            "best_hiding_set": list(self.best_hiding_set),
            "best_total_utility": self.best_total_utility,
            "best_total_set": list(self.best_total_set),
            "best_total_path": list(self.best_total_path),
            "best_total_divert": self.best_total_divert,
            "gap_ratio": round(self.gap_ratio, 12),
            "subsets_checked": self.subsets_checked,
            "exhaustive": self.exhaustive,
        }


def audit_hiding(
    graph: CompatibilityGraph,
    hospital: int,
    mechanism: Mechanism,
    *,
    exhaustive_max: int = 12,
    samples: int = 256,
    seed: int = 0,
    limit: Optional[int] = None,
    keep_outcomes: bool = False,
) -> AuditReport:
    """Search over hidden subsets (and diversions) for the hospital's best manipulation."""
    inst = graph.instance
    truthful = mechanism(graph.full_view)
    u0 = utility(truthful.path, hospital, inst)
    cand = [v for v in inst.members[hospital] if v != inst.altruist]
    subsets, exhaustive = hiding_subsets(cand, exhaustive_max, samples, seed)
    best_h, best_h_set = u0, ()
    best_t_path = best_diversion(graph, truthful.path, hospital, limit)
    u0_div = utility(best_t_path, hospital, inst)
    best_t, best_t_set, best_t_div = u0_div, (), divert_node(truthful.path, best_t_path)
    checked = 0
    kept = []
    for hidden in subsets:
        checked += 1
        if not hidden:
            continue
        out = mechanism(view(graph, Report.hiding(inst, hospital, hidden)))
        if keep_outcomes:
            kept.append((tuple(sorted(hidden)), out))
        u = utility(out.path, hospital, inst)
        if u > best_h:
            best_h, best_h_set = u, tuple(sorted(hidden))
        div = best_diversion(graph, out.path, hospital, limit)
        ud = utility(div, hospital, inst)
        if ud > best_t:
            best_t, best_t_set, best_t_path = ud, tuple(sorted(hidden)), div
            best_t_div = divert_node(out.path, div)
    return AuditReport(hospital, u0, u0_div, best_h, best_h_set, best_t, best_t_set, best_t_path,
                       best_t_div, checked, exhaustive, kept)


def ir_check(graph: CompatibilityGraph, outcome: MechanismOutcome, limit: Optional[int] = None) -> bool:
    """Whether the altruist owner gets at least the length of its best internal path."""
    inst = graph.instance
    return utility(outcome.path, inst.altruist_owner, inst) >= pi_ir(graph.full_view, limit).length


@dataclass(frozen=True)
class TrialResult:
    seed: int
    status: str
    branch: str
    welfare: int
    utilities: tuple[int, ...]
    trace_digest: str


def _trial(args) -> TrialResult:
    instance, mechanism, seed = args
    graph = sample_random_edges(instance, seed)
    out = mechanism(graph.full_view)
    return TrialResult(seed, out.status, out.branch, out.welfare, tuple(out.utilities(instance)), out.trace_digest())


def monte_carlo(
    instance: Instance, mechanism: Mechanism, trials: int, seed0: int = 0, workers: int = 1
) -> list[TrialResult]:
    """Run the mechanism on realizations ``seed0 .. seed0 + trials - 1``; results are in seed order."""
    jobs = [(instance, mechanism, seed0 + t) for t in range(trials)]
    if workers <= 1:
        return [_trial(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_trial, jobs, chunksize=max(1, trials // (4 * workers))))


# ---- bound checks for the audit harness -------------------------------------------------


def avg_deviation_bound_violations(
    graph: CompatibilityGraph, mechanism: Mechanism, truthful: MechanismOutcome, audits: Iterable[AuditReport]
) -> list[str]:
    """Best manipulated utility ``d`` against ``(1 + 1/k) l + 2 s'`` from the truthful selection.

    ``l`` is the hospital's truthful selected total and ``k`` its capped path
    count.  Applies whenever the truthful run got as far as selecting paths.
    """
    sel = truthful.event("selected")
    if sel is None:
        return []
    sp = truthful.params["s_prime"]
    out = []
    for rep in audits:
        key = str(rep.hospital)
        k = sel["capped"].get(key, 0)
        if k < 1:
            continue
        ell = sum(len(p) for p in sel["pathsets"][key])
        d = rep.best_total_utility
        if d * k > (k + 1) * ell + 2 * sp * k:
            out.append(f"hospital {rep.hospital}: d={d} exceeds (1+1/{k})*{ell}+{2 * sp}")
    return out


def avg_ir_return_violations(truthful: MechanismOutcome, audits: Iterable[AuditReport], instance: Instance) -> list[str]:
    """When the truthful run succeeded by returning the fallback path, no manipulation may help anyone."""
    if not (truthful.success and truthful.branch in ("inactive", "exhausted")):
        return []
    base = truthful.utilities(instance)
    return [
        f"hospital {r.hospital} improves {base[r.hospital]} -> {r.best_total_utility}"
        for r in audits
        if r.best_total_utility > base[r.hospital]
    ]


def selected_count(outcome: MechanismOutcome, hospital: int) -> int:
    """Number of fixed-length paths the long-segments mechanism cut for ``hospital`` (0 if it stopped early)."""
    cut = outcome.event("cut_paths")
    return cut["counts"].get(str(hospital), 0) if cut else 0


def s_hiding_bound_violations(
    truthful: MechanismOutcome, report: AuditReport, instance: Instance
) -> list[str]:
    """Hiding-only checks for the long-segments mechanism.

    The manipulator's count of fixed-length paths never grows.  When the
    truthful run stitched, a manipulated stitched run gives a non-special
    hospital at most ``r s'`` (``r`` its truthful count) and the special
    hospital at most the truthful total of its redefined paths.
    """
    h = report.hospital
    out = []
    r = selected_count(truthful, h)
    for hidden, manipulated in report.outcomes:
        if selected_count(manipulated, h) > r:
            out.append(f"hospital {h} hiding {list(hidden)} raised its path count above {r}")
        if truthful.branch != "stitched" or manipulated.branch != "stitched":
            continue
        special = truthful.event("special")
        bound = sum(map(len, special["paths"])) if special["hospital"] == h else r * truthful.params["s_prime"]
        got = utility(manipulated.path, h, instance)
        if got > bound:
            out.append(f"hospital {h} hiding {list(hidden)} got {got} > {bound}")
    return out
