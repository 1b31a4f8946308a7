"""High-averages mechanism: hospitals contribute paths of large mean length.

Each active hospital offers the longest packing of a capped number of
internal paths.  Short paths are dropped and long ones split into pieces of
at least ``4 s'`` nodes.  A breadth-like search from the altruist then looks
for an entry point into one of these paths; once found, the remaining paths
are stitched after it in owner-alternating order.  Whenever the search
cannot make progress the altruist's own best internal path is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .benchmarks import longest_internal_path
from .errors import PreconditionViolated
from .graph_core import Digraph, Path
from .outcome import FAILURE, SUCCESS, MechanismOutcome
from .packing import max_paths_with_mean, select_paths_max_total
from .params import FSpec, MechParamsAvg
from .stitching import StitchPlan, arrange_alternating, stitch

NAME = "mechanism_avg"


class DegenerateNormalization(Exception):
    """No path is long enough to split off another piece."""


def count_paths(graph: Digraph, hospital: int, s: int, f_value: int, limit: Optional[int] = None) -> int:
    return f_value * max_paths_with_mean(graph, hospital, s, limit)


def cap_special(counts: Mapping[int, int]) -> tuple[int, dict[int, int]]:
    """Cap the largest count (ties: smallest id) at the sum of the others."""
    j = min(counts, key=lambda h: (-counts[h], h))
    capped = dict(counts)
    capped[j] = min(counts[j], sum(c for h, c in counts.items() if h != j))
    return j, capped


def normalize_paths(paths: list[Path], count: int, s_prime: int) -> list[Path]:
    """Drop paths shorter than ``4 s'`` then split ``4 s'`` suffixes off the longest until ``count`` paths exist."""
    piece = 4 * s_prime
    out = [p for p in paths if len(p) >= piece]
    while len(out) < count:
        if not out:
            raise DegenerateNormalization("no paths left to split")
        k = min(range(len(out)), key=lambda k: (-len(out[k]), out[k]))
        donor = out[k]
        if len(donor) < 2 * piece:
            raise DegenerateNormalization(f"longest path has {len(donor)} < {2 * piece} nodes")
        out[k] = donor[:-piece]
        out.append(donor[-piece:])
    return out


@dataclass
class SearchResult:
    """Outcome of the exploration phase.

    ``kind`` is ``"found"`` (an entry suffix of at least ``s'`` nodes was cut
    off a path), ``"saturated"`` (``s'`` nodes explored) or ``"exhausted"``.
    ``paths`` maps path id to ``(owner, nodes)`` after all cuts.
    """

    kind: str
    explored: list[int]
    parent: dict[int, Optional[int]]
    paths: dict[int, tuple[int, Path]]
    nu: Optional[int] = None
    path_id: Optional[int] = None
    suffix: Path = ()
    steps: list[dict] = field(default_factory=list)

    def branch_to(self, v: int) -> Path:
        """Tree path from the altruist to explored node ``v``."""
        out = []
        while v is not None:
            out.append(v)
            v = self.parent[v]
        return tuple(reversed(out))


def graph_search(
    graph: Digraph,
    paths: Mapping[int, tuple[int, Path]],
    active: set[int],
    s_prime: int,
) -> SearchResult:
    """Grow an explored set from the altruist, always taking the smallest eligible node.

    Eligible nodes are unexplored out-neighbours of explored nodes that belong
    to an active hospital.  Reaching a node on a path cuts off its suffix;
    a suffix shorter than ``s'`` is absorbed into the explored set.
    """
    paths = {pid: (o, tuple(p)) for pid, (o, p) in paths.items()}
    where = {v: pid for pid, (_, p) in paths.items() for v in p}
    owners = graph.instance.owners
    explored: list[int] = []
    seen: set[int] = set()
    frontier: set[int] = set()
    parent: dict[int, Optional[int]] = {graph.altruist: None}
    steps: list[dict] = []

    def add(v: int) -> None:
        explored.append(v)
        seen.add(v)
        frontier.discard(v)
        frontier.update(w for w in graph.succ[v] if w not in seen and owners[w] in active)

    nu = graph.altruist
    while True:
        add(nu)
        step = {"node": nu}
        if nu in where:
            pid = where[nu]
            owner, p = paths[pid]
            k = p.index(nu)
            sigma = p[k:]
            paths[pid] = (owner, p[:k])
            for v in sigma:
                del where[v]
            step.update(path=pid, cut=len(sigma))
            steps.append(step)
            if len(sigma) >= s_prime:
                return SearchResult("found", explored, parent, paths, nu, pid, sigma, steps)
            for prev, v in zip(sigma, sigma[1:]):
                parent[v] = prev
                add(v)
        else:
            steps.append(step)
        if len(explored) >= s_prime:
            return SearchResult("saturated", explored, parent, paths, steps=steps)
        if not frontier:
            return SearchResult("exhausted", explored, parent, paths, steps=steps)
        nu = min(frontier)
        parent[nu] = next(x for x in explored if graph.has_edge(x, nu))


def find_entry(graph: Digraph, search: SearchResult, s_prime: int) -> Optional[tuple[int, int, int]]:
    """Smallest explored ``v``, then smallest path id, with an edge into that path's first ``s'`` nodes.

    Returns ``(v, path_id, head_index)`` with the earliest head index.
    """
    for v in sorted(search.explored):
        for pid in sorted(search.paths):
            p = search.paths[pid][1]
            for hj in range(min(s_prime, len(p))):
                if graph.has_edge(v, p[hj]):
                    return v, pid, hj
    return None


def _plan(search: SearchResult, first_pid: int, head: Path, window: int, keep_first_rest: bool) -> StitchPlan:
    """Owner-alternating stitch order over all current paths, starting with ``head`` in place of ``first_pid``."""
    items = [(search.paths[pid][0], pid) for pid in sorted(search.paths)]
    order = arrange_alternating(items, first=[pid for _, pid in items].index(first_pid))
    owner = search.paths[first_pid][0]
    seq = [(owner, head)] + [(o, search.paths[pid][1]) for o, pid in order[1:]]
    if keep_first_rest and len(search.paths[first_pid][1]) >= 2 * window:
        seq.append((owner, search.paths[first_pid][1]))
    return StitchPlan(tuple(seq), window)


def stitch_from_cut(search: SearchResult, s_prime: int) -> tuple[StitchPlan, None]:
    """Tree path to the entry node, its cut-off suffix, then all other paths; the truncated path goes last."""
    up = search.parent[search.nu]
    lead = (search.branch_to(up) if up is not None else ()) + search.suffix
    plan = _plan(search, search.path_id, lead, s_prime, keep_first_rest=True)
    return plan, None


def stitch_from_entry(search: SearchResult, s_prime: int, entry: tuple[int, int, int]) -> tuple[StitchPlan, Path]:
    """Plan for entering path ``entry[1]`` at ``entry[2]`` from explored node ``entry[0]``; also returns the tree path."""
    v, pid, hj = entry
    p = search.paths[pid][1]
    plan = _plan(search, pid, p[hj:], s_prime, keep_first_rest=False)
    return plan, search.branch_to(v)


def run_mechanism_avg(
    graph: Digraph,
    s: int,
    *,
    f: FSpec = None,
    n_min: int = 1,
    limit: Optional[int] = None,
) -> MechanismOutcome:
    """Run the high-averages mechanism on a (reported) graph."""
    inst = graph.instance
    params = MechParamsAvg.from_s(s, inst.n, f)
    sp, fv = params.s_prime, params.f_value
    alpha, a = graph.altruist, graph.altruist_owner
    trace: list[dict] = [{"event": "params", **params.as_dict()}]

    def fallback(status: str, branch: str) -> MechanismOutcome:
        path = longest_internal_path(graph, a, alpha, limit=limit)
        trace.append({"event": "result", "status": status, "branch": branch, "path": list(path)})
        return MechanismOutcome(NAME, status, path, branch, params.as_dict(), tuple(trace))

    if inst.n < n_min:
        return fallback(SUCCESS, "small_instance")

    counts = {h: count_paths(graph, h, s, fv, limit) for h in graph.hospitals}
    active = {h for h, c in counts.items() if c > 0}
    trace.append({"event": "counts", "counts": {str(h): c for h, c in counts.items()}, "active": sorted(active)})
    if a not in active or active == {a}:
        return fallback(SUCCESS, "inactive")

    j, capped = cap_special(counts)
    selected = {h: select_paths_max_total(graph, h, capped[h], limit).paths for h in sorted(active)}
    trace.append({
        "event": "selected",
        "special": j,
        "capped": {str(h): capped[h] for h in sorted(active)},
        "pathsets": {str(h): [list(p) for p in ps] for h, ps in selected.items()},
    })
    try:
        normalized = {h: normalize_paths(list(ps), capped[h], sp) for h, ps in selected.items()}
    except DegenerateNormalization as exc:
        trace.append({"event": "degenerate", "reason": str(exc)})
        return fallback(FAILURE, "degenerate")

    paths: dict[int, tuple[int, Path]] = {}
    for h in sorted(normalized):
        for p in normalized[h]:
            paths[len(paths)] = (h, p)
    trace.append({"event": "normalized", "paths": [[o, list(p)] for o, p in paths.values()]})

    search = graph_search(graph, paths, active, sp)
    trace.append({"event": "search", "kind": search.kind, "explored": list(search.explored),
                  "max_explored": len(search.explored), "steps": search.steps})

    if search.kind == "found":
        branch = "stitch1"
        try:
            plan, prefix = stitch_from_cut(search, sp)
        except PreconditionViolated as exc:
            trace.append({"event": "plan_error", "reason": str(exc)})
            return fallback(FAILURE, "plan_error")
    elif search.kind == "exhausted":
        return fallback(SUCCESS, "exhausted")
    else:
        entry = find_entry(graph, search, sp)
        trace.append({"event": "entry", "entry": list(entry) if entry else None})
        if entry is None:
            return fallback(FAILURE, "no_entry")
        branch = "stitch2"
        try:
            plan, prefix = stitch_from_entry(search, sp, entry)
        except PreconditionViolated as exc:
            trace.append({"event": "plan_error", "reason": str(exc)})
            return fallback(FAILURE, "plan_error")

    result = stitch(plan, graph.has_edge)
    trace.append({"event": "stitch", "edges": [list(e) for e in result.stitches], "failed_at": result.failed_at,
                  "short_entries": plan.short_entries()})
    if not result.ok:
        return fallback(FAILURE, branch + "_failed")
    path = (prefix or ()) + result.path
    trace.append({"event": "result", "status": SUCCESS, "branch": branch, "path": list(path)})
    return MechanismOutcome(NAME, SUCCESS, path, branch, params.as_dict(), tuple(trace))


def loss_bound_violations(outcome: MechanismOutcome) -> list[str]:
    """Selected nodes of each hospital missing from a stitched path are bounded by ``s' (6 k + 3)``."""
    if outcome.branch not in ("stitch1", "stitch2"):
        return []
    sel = outcome.event("selected")
    sp = outcome.params["s_prime"]
    on_path = set(outcome.path)
    out = []
    for h, ps in sel["pathsets"].items():
        k = sel["capped"][h]
        lost = sum(1 for p in ps for v in p if v not in on_path)
        if lost > sp * (6 * k + 3):
            out.append(f"hospital {h} lost {lost} > {sp * (6 * k + 3)} selected nodes")
    return out


def invariant_violations(outcome: MechanismOutcome, graph: Digraph) -> list[str]:
    out = []
    search = outcome.event("search")
    if search is not None and search["max_explored"] > 2 * outcome.params["s_prime"]:
        out.append(f"explored {search['max_explored']} nodes, more than 2 s'")
    norm = outcome.event("normalized")
    sel = outcome.event("selected")
    if norm is not None:
        sp = outcome.params["s_prime"]
        per: dict[int, int] = {}
        for o, p in norm["paths"]:
            per[o] = per.get(o, 0) + 1
            if len(p) < 4 * sp:
                out.append(f"normalized path of {len(p)} nodes is shorter than 4 s'")
        for h, c in sel["capped"].items():
            if per.get(int(h), 0) != c:
                out.append(f"hospital {h} has {per.get(int(h), 0)} normalized paths, expected {c}")
    stitch_ev = outcome.event("stitch")
    if stitch_ev is not None and stitch_ev["short_entries"]:
        out.append("a stitched path is shorter than twice the window")
    if outcome.branch in ("inactive", "exhausted", "small_instance") and outcome.status != SUCCESS:
        out.append("fallback branch must report success")
    out.extend(loss_bound_violations(outcome))
    return out
