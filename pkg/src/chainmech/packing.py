"""Exact packings of vertex-disjoint internal paths inside one hospital.

Every packing question the mechanisms ask reduces to a *profile*: for each
path count ``c``, the largest total length of ``c`` disjoint internal paths
whose lengths obey a policy (exactly ``L`` nodes, or at least ``L``), with an
optional requirement that one path starts at a given anchor node.

The internal subgraph is split into weakly connected components.  Components
that are simple directed chains are solved in closed form; every other
component is solved exhaustively by dynamic programming over node subsets,
which is exact but exponential, so such components are capped in size.
Component profiles are then combined by max-plus convolution.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ExactSearchBudgetError, PreconditionViolated
from .graph_core import Digraph, Path, PathSet

DEFAULT_PACKING_LIMIT = 14

Totals = list[Optional[int]]


def packing_limit(limit: Optional[int] = None) -> int:
    if limit is not None:
        return limit
    return int(os.environ.get("CHAINMECH_PACKING_LIMIT", DEFAULT_PACKING_LIMIT))


@dataclass(frozen=True)
class Policy:
    min_len: int
    exact: bool = False

    def allows(self, length: int) -> bool:
        return length == self.min_len if self.exact else length >= self.min_len


class Profile:
    """Best total length per path count, with lazily reconstructed witnesses."""

    def __init__(self, totals: Totals, witness: Callable[[int], list[Path]]):
        self.totals = totals
        self._witness = witness

    def feasible(self, c: int) -> bool:
        return 0 <= c < len(self.totals) and self.totals[c] is not None

    def witness(self, c: int) -> tuple[Path, ...]:
        if not self.feasible(c):
            raise ValueError(f"no packing with {c} paths")
        return tuple(self._witness(c))

    def best_in(self, lo: int, hi: int) -> Optional[int]:
        """Count in ``[lo, hi]`` with the largest total; ties go to fewer paths."""
        best = None
        for c in range(max(lo, 0), min(hi, len(self.totals) - 1) + 1):
            t = self.totals[c]
            if t is not None and (best is None or t > self.totals[best]):
                best = c
        return best


_EMPTY = Profile([0], lambda c: [])


def _convolve(a: Profile, b: Profile) -> Profile:
    size = len(a.totals) + len(b.totals) - 1
    totals: Totals = [None] * size
    split: list[int] = [0] * size
    for i, ta in enumerate(a.totals):
        if ta is None:
            continue
        for j, tb in enumerate(b.totals):
            if tb is None:
                continue
            if totals[i + j] is None or ta + tb > totals[i + j]:
                totals[i + j] = ta + tb
                split[i + j] = i

    def witness(c: int) -> list[Path]:
        i = split[c]
        return a._witness(i) + b._witness(c - i)

    return Profile(totals, witness)


def _chain_profile(nodes: list[int], policy: Policy, anchored: bool = False) -> Profile:
    """Packings of a simple chain; with ``anchored`` one path must start at ``nodes[0]``."""
    m = len(nodes)
    L = policy.min_len
    most = m // L
    totals: Totals = [None] * (most + 1)
    for c in range(most + 1):
        if c == 0:
            totals[c] = None if anchored else 0
        else:
            totals[c] = c * L if policy.exact else m

    def witness(c: int) -> list[Path]:
        if c == 0:
            return []
        if policy.exact:
            return [tuple(nodes[k * L:(k + 1) * L]) for k in range(c)]
        head = m - (c - 1) * L
        return [tuple(nodes[:head])] + [tuple(nodes[head + k * L: head + (k + 1) * L]) for k in range(c - 1)]

    return Profile(totals, witness)


def _components(nodes: tuple[int, ...], succ: dict[int, tuple[int, ...]]) -> list[list[int]]:
    adj: dict[int, set[int]] = {v: set() for v in nodes}
    for v in nodes:
        for w in succ[v]:
            adj[v].add(w)
            adj[w].add(v)
    seen: set[int] = set()
    comps = []
    for v in nodes:
        if v in seen:
            continue
        comp = []
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _as_chain(comp: list[int], succ: dict[int, tuple[int, ...]]) -> Optional[list[int]]:
    indeg = {v: 0 for v in comp}
    for v in comp:
        if len(succ[v]) > 1:
            return None
        for w in succ[v]:
            indeg[w] += 1
    if any(d > 1 for d in indeg.values()):
        return None
    sources = [v for v in comp if indeg[v] == 0]
    if len(sources) != 1:
        return None
    order = [sources[0]]
    while succ[order[-1]]:
        order.append(succ[order[-1]][0])
    return order if len(order) == len(comp) else None


class _SubsetSolver:
    """Exhaustive packing over the node subsets of one small component."""

    def __init__(self, comp: list[int], succ: dict[int, tuple[int, ...]], policy: Policy):
        self.comp = comp
        self.index = {v: k for k, v in enumerate(comp)}
        self.out = [[self.index[w] for w in succ[v] if w in self.index] for v in comp]
        self.policy = policy
        self.starts = self._path_masks()
        h = len(comp)
        self.by_low: list[list[int]] = [[] for _ in range(h)]
        for mask in sorted(self.starts):
            if policy.allows(mask.bit_count()):
                self.by_low[(mask & -mask).bit_length() - 1].append(mask)
        self.memo: dict[int, tuple[Totals, list[Optional[int]]]] = {}

    def _path_masks(self) -> dict[int, int]:
        """Map every vertex set spanned by some simple path to the bitmask of its possible start nodes."""
        starts: dict[int, int] = {}
        layer = {(1 << k, k): 1 << k for k in range(len(self.comp))}
        while layer:
            nxt: dict[tuple[int, int], int] = {}
            for (mask, end), st in layer.items():
                starts[mask] = starts.get(mask, 0) | st
                for w in self.out[end]:
                    if not mask >> w & 1:
                        key = (mask | 1 << w, w)
                        nxt[key] = nxt.get(key, 0) | st
            layer = nxt
        return starts

    def solve(self, universe: int) -> tuple[Totals, list[Optional[int]]]:
        if universe == 0:
            return [0], [None]
        hit = self.memo.get(universe)
        if hit is not None:
            return hit
        low = (universe & -universe).bit_length() - 1
        skip_totals, _ = self.solve(universe & ~(1 << low))
        totals = list(skip_totals)
        choice: list[Optional[int]] = [None] * len(totals)
        for cand in self.by_low[low]:
            if cand & ~universe:
                continue
            sub, _ = self.solve(universe & ~cand)
            size = cand.bit_count()
            for c, t in enumerate(sub):
                if t is None:
                    continue
                while len(totals) <= c + 1:
                    totals.append(None)
                    choice.append(None)
                if totals[c + 1] is None or t + size > totals[c + 1]:
                    totals[c + 1] = t + size
                    choice[c + 1] = cand
        self.memo[universe] = (totals, choice)
        return totals, choice

    def masks(self, universe: int, c: int) -> list[int]:
        out = []
        while c > 0:
            _, choice = self.solve(universe)
            cand = choice[c] if c < len(choice) else None
            if cand is None:
                universe &= universe - 1
            else:
                out.append(cand)
                universe &= ~cand
                c -= 1
        return out

    def order(self, mask: int, start: Optional[int] = None) -> Path:
        """A Hamiltonian path of the induced subgraph on ``mask`` (lexicographically smallest)."""
        first = [start] if start is not None else [k for k in range(len(self.comp)) if self.starts[mask] >> k & 1]
        size = mask.bit_count()
        for s in first:
            seq = [s]

            def extend(used: int) -> bool:
                if len(seq) == size:
                    return True
                for w in sorted(self.out[seq[-1]], key=lambda k: self.comp[k]):
                    if mask >> w & 1 and not used >> w & 1:
                        seq.append(w)
                        if extend(used | 1 << w):
                            return True
                        seq.pop()
                return False

            if extend(1 << s):
                return tuple(self.comp[k] for k in seq)
        raise AssertionError("mask is not spanned by a path")

    def profile(self, anchor: Optional[int] = None) -> Profile:
        full = (1 << len(self.comp)) - 1
        if anchor is None:
            totals, _ = self.solve(full)

            def witness(c: int) -> list[Path]:
                return [self.order(m) for m in self.masks(full, c)]

            return Profile(totals, witness)

        a = self.index[anchor]
        totals: Totals = [None]
        picked: list[Optional[int]] = [None]
        for mask in sorted(self.starts):
            if not (self.starts[mask] >> a & 1) or not self.policy.allows(mask.bit_count()):
                continue
            sub, _ = self.solve(full & ~mask)
            for c, t in enumerate(sub):
                if t is None:
                    continue
                while len(totals) <= c + 1:
                    totals.append(None)
                    picked.append(None)
                val = t + mask.bit_count()
                if totals[c + 1] is None or val > totals[c + 1]:
                    totals[c + 1] = val
                    picked[c + 1] = mask

        def anchored_witness(c: int) -> list[Path]:
            head = picked[c]
            return [self.order(head, a)] + [self.order(m) for m in self.masks(full & ~head, c - 1)]

        return Profile(totals, anchored_witness)


def packing_profile(
    graph: Digraph,
    hospital: int,
    policy: Policy,
    anchor: Optional[int] = None,
    limit: Optional[int] = None,
) -> Profile:
    """Profile of disjoint internal paths of ``hospital`` in ``graph`` under ``policy``."""
    if policy.min_len < 1:
        raise ValueError("path lengths are at least 1")
    nodes = graph.members[hospital]
    succ = graph.internal_succ(hospital)
    if anchor is not None and anchor not in succ:
        raise PreconditionViolated(f"anchor {anchor} is not a node of hospital {hospital}")
    lim = packing_limit(limit)
    profile = _EMPTY
    for comp in _components(nodes, succ):
        chain = _as_chain(comp, succ)
        has_anchor = anchor is not None and anchor in comp
        if chain is not None:
            if has_anchor:
                t = chain.index(anchor)
                part = _convolve(_chain_profile(chain[:t], policy), _chain_profile(chain[t:], policy, anchored=True))
            else:
                part = _chain_profile(chain, policy)
        else:
            if len(comp) > lim:
                raise ExactSearchBudgetError("path packing", len(comp), lim)
            part = _SubsetSolver(comp, succ, policy).profile(anchor if has_anchor else None)
        profile = _convolve(profile, part)
    return profile


def max_count_exact_length_paths(
    graph: Digraph, hospital: int, length: int, anchor: Optional[int] = None, limit: Optional[int] = None
) -> PathSet:
    """Largest set of disjoint internal paths with exactly ``length`` nodes each."""
    prof = packing_profile(graph, hospital, Policy(length, exact=True), anchor, limit)
    feasible = [c for c in range(len(prof.totals)) if prof.feasible(c)]
    if not feasible:
        raise PreconditionViolated(f"no internal path of {length} nodes starts at anchor {anchor}")
    return PathSet(hospital, prof.witness(max(feasible)))


def redefine_special_paths(
    graph: Digraph,
    hospital: int,
    lower: int,
    upper: int,
    min_len: int,
    anchor: Optional[int] = None,
    limit: Optional[int] = None,
) -> PathSet:
    """Disjoint internal paths of maximum total length with count in ``[lower, upper]``, each ``>= min_len``."""
    prof = packing_profile(graph, hospital, Policy(min_len), anchor, limit)
    lo = max(lower, 1 if anchor is not None else 0)
    c = prof.best_in(lo, upper)
    if c is None:
        raise PreconditionViolated(f"no packing with between {lo} and {upper} paths of >= {min_len} nodes")
    return PathSet(hospital, prof.witness(c))


def select_paths_max_total(graph: Digraph, hospital: int, cap: int, limit: Optional[int] = None) -> PathSet:
    """At most ``cap`` disjoint internal paths of maximum total length (fewest paths on ties)."""
    if cap < 1:
        raise ValueError("cap must be positive")
    prof = packing_profile(graph, hospital, Policy(1), None, limit)
    return PathSet(hospital, prof.witness(prof.best_in(0, cap)))


def max_paths_with_mean(graph: Digraph, hospital: int, s: int, limit: Optional[int] = None) -> int:
    """Largest number of disjoint internal paths whose mean length is at least ``s`` (0 if none)."""
    prof = packing_profile(graph, hospital, Policy(1), None, limit)
    best = 0
    for c in range(1, len(prof.totals)):
        t = prof.totals[c]
        if t is not None and t >= s * c:
            best = c
    return best
