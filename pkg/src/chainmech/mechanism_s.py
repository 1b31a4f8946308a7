"""Long-segments mechanism: every hospital contributes paths of at least s' nodes.

Each hospital's paths are cut to a fixed length, the hospital with the most
paths is re-optimized under a count window, the paths are arranged so that
owners alternate, and consecutive paths are joined by random cross edges
found within short end windows.
"""

from __future__ import annotations

from typing import Mapping, Optional

from .benchmarks import has_internal_path
from .errors import PreconditionViolated
from .graph_core import Digraph, Path, PathSet
from .outcome import FAILURE, SUCCESS, MechanismOutcome
from .packing import max_count_exact_length_paths, redefine_special_paths
from .params import FSpec, MechParamsS
from .stitching import StitchPlan, arrange_alternating, stitch

NAME = "mechanism_s"


def select_special(counts: Mapping[int, int]) -> int:
    """Hospital with the most paths; ties go to the smallest id."""
    return min(counts, key=lambda h: (-counts[h], h))


def order_paths(pathsets: Mapping[int, PathSet], altruist: int) -> list[tuple[int, Path]]:
    """Owner-alternating order of all paths, starting with the path through the altruist.

    If the altruist's hospital holds exactly one path more than all others
    together, its paths cannot alternate cyclically; the remaining paths are
    then arranged on their own, rotated to start at another hospital, and the
    altruist path is put in front.
    """
    items = [(h, p) for h in sorted(pathsets) for p in pathsets[h].paths]
    first = next(k for k, (_, p) in enumerate(items) if p[0] == altruist)
    try:
        return arrange_alternating(items, first=first)
    except PreconditionViolated:
        head = items[first]
        rest = arrange_alternating(items[:first] + items[first + 1:])
        if rest:
            k = next(k for k, (h, _) in enumerate(rest) if h != head[0])
            rest = rest[k:] + rest[:k]
        return [head] + rest


def _dump(pathsets: Mapping[int, PathSet]) -> dict[str, list[list[int]]]:
    return {str(h): [list(p) for p in ps.paths] for h, ps in sorted(pathsets.items())}


def run_mechanism_s(
    graph: Digraph,
    s: int,
    *,
    f: FSpec = None,
    n_min: int = 1,
    limit: Optional[int] = None,
) -> MechanismOutcome:
    """Run the long-segments mechanism on a (reported) graph.

    Parameters are derived from the instance size ``n`` rather than the size
    of the reported graph, so hiding nodes cannot shift them.  ``n_min``
    optionally forces the trivial outcome on small instances.
    """
    inst = graph.instance
    params = MechParamsS.from_s(s, inst.n, f)
    sp, spp = params.s_prime, params.s_dprime
    alpha, a = graph.altruist, graph.altruist_owner
    trace: list[dict] = [{"event": "params", **params.as_dict()}]

    def done(status: str, path: Path, branch: str) -> MechanismOutcome:
        trace.append({"event": "result", "status": status, "branch": branch, "path": list(path)})
        return MechanismOutcome(NAME, status, tuple(path), branch, params.as_dict(), tuple(trace))

    if inst.n < n_min:
        return done(SUCCESS, (alpha,), "small_instance")
    if not has_internal_path(graph, a, alpha, sp, limit=limit):
        return done(SUCCESS, (alpha,), "trivial")

    pathsets = {
        h: max_count_exact_length_paths(graph, h, sp, anchor=alpha if h == a else None, limit=limit)
        for h in graph.hospitals
    }
    counts = {h: len(ps) for h, ps in pathsets.items()}
    trace.append({"event": "cut_paths", "pathsets": _dump(pathsets), "counts": {str(h): c for h, c in counts.items()}})

    j = select_special(counts)
    others = [c for h, c in counts.items() if h != j]
    lower = max(others, default=0)
    upper = sum(others) + (1 if j == a else 0)
    pathsets[j] = redefine_special_paths(graph, j, lower, upper, sp, anchor=alpha if j == a else None, limit=limit)
    trace.append({"event": "special", "hospital": j, "lower": lower, "upper": upper,
                  "paths": [list(p) for p in pathsets[j].paths]})

    sequence = order_paths(pathsets, alpha)
    trace.append({"event": "arrangement", "owners": [h for h, _ in sequence]})
    plan = StitchPlan(tuple(sequence), spp)
    result = stitch(plan, graph.has_edge)
    trace.append({"event": "stitch", "edges": [list(e) for e in result.stitches], "failed_at": result.failed_at,
                  "short_entries": plan.short_entries()})
    if not result.ok:
        return done(FAILURE, (alpha,), "stitch_failed")
    return done(SUCCESS, result.path, "stitched")


def final_pathsets(outcome: MechanismOutcome) -> dict[int, list[Path]]:
    """Path sets that were handed to the stitcher, read back from the trace."""
    cut = outcome.event("cut_paths")
    special = outcome.event("special")
    if cut is None or special is None:
        return {}
    out = {int(h): [tuple(p) for p in ps] for h, ps in cut["pathsets"].items()}
    out[special["hospital"]] = [tuple(p) for p in special["paths"]]
    return out


def invariant_violations(outcome: MechanismOutcome, graph: Digraph) -> list[str]:
    """Mechanism-specific checks on a finished run."""
    out = []
    sets = final_pathsets(outcome)
    if outcome.branch != "stitched":
        if outcome.path != (graph.altruist,):
            out.append("non-stitched outcome must be the altruist alone")
        return out
    spp = outcome.params["s_dprime"]
    if outcome.event("stitch")["short_entries"]:
        out.append("a stitched path is shorter than twice the window")
    covered = {v for ps in sets.values() for p in ps for v in p}
    if not set(outcome.path) <= covered:
        out.append("stitched path uses nodes outside the selected paths")
    inst = graph.instance
    got = outcome.utilities(inst)
    for h, ps in sets.items():
        floor = sum(len(p) - 2 * spp for p in ps)
        if got[h] < floor:
            out.append(f"hospital {h} got {got[h]} < accounted {floor}")
    counts = {h: len(ps) for h, ps in sets.items()}
    j = outcome.event("special")["hospital"]
    rest = sum(c for h, c in counts.items() if h != j)
    if counts[j] > rest + (1 if j == graph.altruist_owner else 0):
        out.append("special hospital holds too many paths to alternate")
    return out
