"""Brute-force reference implementations used only by the tests.

They enumerate everything and share no code with the package's solvers
beyond the plain data types.
"""

from __future__ import annotations

import functools
from collections import Counter


def adjacency(nodes, edges):
    succ = {v: [] for v in nodes}
    for u, v in edges:
        if u in succ and v in succ:
            succ[u].append(v)
    return succ


def all_simple_paths(succ, start, allowed=None):
    """Every simple path from ``start`` (including the single node), in DFS order."""
    if allowed is not None and start not in allowed:
        return []
    out = []

    def go(path):
        out.append(tuple(path))
        for w in succ[path[-1]]:
            if w not in path and (allowed is None or w in allowed):
                go(path + [w])

    go([start])
    return out


def blocks(path, owners):
    out = []
    for v in path:
        if out and owners[out[-1][-1]] == owners[v]:
            out[-1].append(v)
        else:
            out.append([v])
    return out


def sopt_ok(path, owners, s):
    return all(len(b) >= s for b in blocks(path, owners))


def avgopt_ok(path, owners, s):
    segs, nodes = Counter(), Counter()
    for b in blocks(path, owners):
        segs[owners[b[0]]] += 1
        nodes[owners[b[0]]] += len(b)
    return all(nodes[h] >= s * segs[h] for h in segs)


def benchmark_lengths(graph, s):
    """(opt, sopt, avgopt, pi_ir) lengths by enumeration on a package Digraph."""
    owners = graph.instance.owners
    succ = adjacency(graph.nodes, graph.edges)
    paths = all_simple_paths(succ, graph.altruist)
    a = owners[graph.altruist]
    opt = max(len(p) for p in paths)
    sopt = max((len(p) for p in paths if sopt_ok(p, owners, s)), default=0)
    avg = max((len(p) for p in paths if avgopt_ok(p, owners, s)), default=0)
    pir = max(len(p) for p in paths if all(owners[v] == a for v in p))
    return opt, sopt, avg, pir


def internal_paths(graph, hospital):
    owners = graph.instance.owners
    members = {v for v in graph.nodes if owners[v] == hospital}
    succ = adjacency(members, graph.edges)
    return [p for v in sorted(members) for p in all_simple_paths(succ, v)]


def disjoint_families(paths, max_count=None):
    """All families of pairwise vertex-disjoint paths (as tuples of paths)."""
    out = []

    def go(start, chosen, used):
        out.append(tuple(chosen))
        if max_count is not None and len(chosen) == max_count:
            return
        for k in range(start, len(paths)):
            p = paths[k]
            if used.isdisjoint(p):
                go(k + 1, chosen + [p], used | set(p))

    go(0, [], set())
    return out


def alternating_cycle_exists(colors):
    """Whether some cyclic order of the multiset has no equal neighbours.

    Exhaustive search over count vectors: place colors one at a time, never
    repeating the previous one, and require the last to differ from the first.
    """
    if len(colors) <= 1:
        return len(colors) == 0
    kinds = sorted(set(colors))
    start = tuple(colors.count(c) for c in kinds)

    @functools.lru_cache(maxsize=None)
    def go(counts, prev, first):
        if sum(counts) == 0:
            return prev != first
        for c, m in enumerate(counts):
            if m and c != prev:
                nxt = counts[:c] + (m - 1,) + counts[c + 1:]
                if go(nxt, c, first):
                    return True
        return False

    return any(go(start[:c] + (start[c] - 1,) + start[c + 1:], c, c) for c in range(len(kinds)) if start[c])


def best_diversion_utility(full_graph, path, hospital):
    """Max utility over all (divert node, internal extension) pairs, identity included."""
    owners = full_graph.instance.owners
    members = {v for v in full_graph.nodes if owners[v] == hospital}
    succ = adjacency(members, full_graph.edges)
    best = sum(owners[v] == hospital for v in path)
    for k, v in enumerate(path):
        if owners[v] != hospital:
            continue
        prefix = path[:k]
        before = sum(owners[x] == hospital for x in prefix)
        for ext in all_simple_paths(succ, v, allowed=members - set(prefix)):
            best = max(best, before + len(ext))
    return best
