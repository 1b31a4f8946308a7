"""Exact longest-path benchmarks from the altruist.

All four benchmarks share one depth-first branch-and-bound search whose
bound is the number of still-reachable nodes.  Successors are tried in
increasing id order and the incumbent is only replaced by a strictly longer
path, so among equally long optima the lexicographically smallest node
sequence is returned.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .errors import ExactSearchBudgetError
from .graph_core import Digraph, Path

DEFAULT_EXACT_LIMIT = 24
KINDS = ("Opt", "SOpt", "AvgOpt", "PiIR")


def exact_limit(limit: Optional[int] = None) -> int:
    if limit is not None:
        return limit
    return int(os.environ.get("CHAINMECH_EXACT_LIMIT", DEFAULT_EXACT_LIMIT))


@dataclass(frozen=True)
class BenchmarkResult:
    kind: str
    s: Optional[int]
    path: Path
    certified: bool = True

    @property
    def length(self) -> int:
        return len(self.path)


class _Done(Exception):
    pass


def _functional(region: frozenset[int], succ: dict[int, tuple[int, ...]]) -> bool:
    for v in region:
        if sum(1 for w in succ[v] if w in region) > 1:
            return False
    return True


def _reach(v: int, region: frozenset[int], used: set[int], succ) -> int:
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in succ[u]:
            if w in region and w not in used and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) - 1


def _feasible_prefix(path: Path, owners, mode: str, s: int) -> int:
    """Length of the longest prefix of ``path`` meeting the segment constraint (0 if none)."""
    best = 0
    seg_len = 0
    segs: dict[int, int] = {}
    count: dict[int, int] = {}
    ok_hops = True
    for k, v in enumerate(path):
        h = owners[v]
        if k == 0 or owners[path[k - 1]] != h:
            if k > 0 and seg_len < s:
                ok_hops = False
            seg_len = 0
            segs[h] = segs.get(h, 0) + 1
        seg_len += 1
        count[h] = count.get(h, 0) + 1
        if mode == "opt":
            best = k + 1
        elif mode == "sopt":
            if not ok_hops:
                break
            if seg_len >= s:
                best = k + 1
        elif all(count[g] >= s * segs[g] for g in segs):
            best = k + 1
    return best


def longest_path(
    graph: Digraph,
    start: int,
    *,
    region: Optional[Iterable[int]] = None,
    mode: str = "opt",
    s: int = 1,
    limit: Optional[int] = None,
    target: Optional[int] = None,
) -> Path:
    """Longest simple path from ``start`` inside ``region`` meeting the ``mode`` constraint.

    ``mode`` is one of ``opt`` (no constraint), ``sopt`` (every segment has at
    least ``s`` nodes) or ``avgopt`` (every hospital on the path has mean
    segment length at least ``s``).  Returns ``()`` when no path qualifies.
    With ``target`` the search stops at the first qualifying path that long.
    """
    if mode not in ("opt", "sopt", "avgopt"):
        raise ValueError(f"unknown mode {mode!r}")
    region = graph.nodes if region is None else frozenset(region) & graph.nodes
    if start not in region:
        return ()
    succ = graph.succ
    owners = graph.instance.owners

    if _functional(region, succ):
        walk = [start]
        seen = {start}
        while True:
            nxt = [w for w in succ[walk[-1]] if w in region]
            if not nxt or nxt[0] in seen:
                break
            walk.append(nxt[0])
            seen.add(nxt[0])
        return tuple(walk[: _feasible_prefix(tuple(walk), owners, mode, s)])

    lim = exact_limit(limit)
    if len(region) > lim:
        raise ExactSearchBudgetError("longest path", len(region), lim)

    best: list[int] = []
    path = [start]
    used = {start}
    segs: dict[int, int] = {owners[start]: 1}
    count: dict[int, int] = {owners[start]: 1}

    def feasible(seg_len: int) -> bool:
        if mode == "opt":
            return True
        if mode == "sopt":
            return seg_len >= s
        return all(count[g] >= s * segs[g] for g in segs)

    def dfs(v: int, seg_len: int) -> None:
        nonlocal best
        if len(path) > len(best) and feasible(seg_len):
            best = list(path)
            if target is not None and len(best) >= target:
                raise _Done
        if len(path) + _reach(v, region, used, succ) <= len(best):
            return
        hv = owners[v]
        for w in succ[v]:
            if w not in region or w in used:
                continue
            hw = owners[w]
            hop = hw != hv
            if hop and mode == "sopt" and seg_len < s:
                continue
            path.append(w)
            used.add(w)
            if hop:
                segs[hw] = segs.get(hw, 0) + 1
            count[hw] = count.get(hw, 0) + 1
            dfs(w, 1 if hop else seg_len + 1)
            count[hw] -= 1
            if hop:
                segs[hw] -= 1
                if segs[hw] == 0:
                    del segs[hw], count[hw]
            used.discard(w)
            path.pop()

    try:
        dfs(start, 1)
    except _Done:
        pass
    return tuple(best)


def longest_internal_path(
    graph: Digraph,
    hospital: int,
    start: int,
    forbidden: Iterable[int] = (),
    limit: Optional[int] = None,
) -> Path:
    """Longest path from ``start`` using only the hospital's nodes (hence only internal edges)."""
    region = frozenset(graph.members[hospital]) - frozenset(forbidden)
    return longest_path(graph, start, region=region, limit=limit)


def has_internal_path(graph: Digraph, hospital: int, start: int, length: int, limit: Optional[int] = None) -> bool:
    """Whether some internal path of at least ``length`` nodes starts at ``start``."""
    region = frozenset(graph.members[hospital])
    found = longest_path(graph, start, region=region, limit=limit, target=length)
    return len(found) >= length


def opt(graph: Digraph, limit: Optional[int] = None) -> BenchmarkResult:
    return BenchmarkResult("Opt", None, longest_path(graph, graph.altruist, limit=limit))


def sopt(graph: Digraph, s: int, limit: Optional[int] = None) -> BenchmarkResult:
    if s < 1:
        raise ValueError("s must be positive")
    return BenchmarkResult("SOpt", s, longest_path(graph, graph.altruist, mode="sopt", s=s, limit=limit))


def avgopt(graph: Digraph, s: int, limit: Optional[int] = None) -> BenchmarkResult:
    if s < 1:
        raise ValueError("s must be positive")
    return BenchmarkResult("AvgOpt", s, longest_path(graph, graph.altruist, mode="avgopt", s=s, limit=limit))


def pi_ir(graph: Digraph, limit: Optional[int] = None) -> BenchmarkResult:
    path = longest_internal_path(graph, graph.altruist_owner, graph.altruist, limit=limit)
    return BenchmarkResult("PiIR", None, path)


BENCHMARKS: dict[str, Callable[..., BenchmarkResult]] = {
    "opt": lambda g, s=None, limit=None: opt(g, limit),
    "sopt": lambda g, s, limit=None: sopt(g, s, limit),
    "avgopt": lambda g, s, limit=None: avgopt(g, s, limit),
    "pi_ir": lambda g, s=None, limit=None: pi_ir(g, limit),
}
