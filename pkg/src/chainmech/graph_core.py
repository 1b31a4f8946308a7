"""Compatibility-graph model: instances, random cross edges, reported views and path accounting.

Node ids are dense integers ``0..n-1`` and hospital ids are dense integers
``0..h-1``.  Paths are plain tuples of node ids; a path's length is its
number of nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import InstanceError

Path = tuple[int, ...]

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    z = x + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def as_probability(p: Union[Fraction, str, float, int]) -> Fraction:
    if isinstance(p, Fraction):
        value = p
    elif isinstance(p, float):
        value = Fraction(repr(p))
    else:
        value = Fraction(p)
    if not 0 <= value <= 1:
        raise InstanceError(f"edge probability {p} outside [0, 1]")
    return value


@dataclass(frozen=True)
class Instance:
    """Base graph, hospital ownership, altruist and random-edge probability."""

    n: int
    owners: tuple[int, ...]
    base_edges: frozenset[tuple[int, int]]
    altruist: int
    p: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "owners", tuple(int(o) for o in self.owners))
        object.__setattr__(self, "base_edges", frozenset((int(u), int(v)) for u, v in self.base_edges))
        object.__setattr__(self, "p", as_probability(self.p))
        if self.n < 1:
            raise InstanceError("an instance needs at least one node")
        if len(self.owners) != self.n:
            raise InstanceError(f"owners has {len(self.owners)} entries for n={self.n}")
        hospitals = set(self.owners)
        if min(hospitals) < 0 or hospitals != set(range(max(hospitals) + 1)):
            raise InstanceError("hospital ids must be dense integers starting at 0")
        for u, v in self.base_edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InstanceError(f"edge ({u}, {v}) references an unknown node")
            if u == v:
                raise InstanceError(f"self-loop at node {u}")
        if not 0 <= self.altruist < self.n:
            raise InstanceError(f"altruist {self.altruist} is not a node")

    @property
    def altruist_owner(self) -> int:
        return self.owners[self.altruist]

    @cached_property
    def hospitals(self) -> tuple[int, ...]:
        return tuple(range(max(self.owners) + 1))

    @cached_property
    def members(self) -> tuple[tuple[int, ...], ...]:
        """Sorted node ids of every hospital, indexed by hospital id."""
        out: list[list[int]] = [[] for _ in self.hospitals]
        for v, o in enumerate(self.owners):
            out[o].append(v)
        return tuple(tuple(m) for m in out)

    def owner(self, v: int) -> int:
        return self.owners[v]

    def with_p(self, p) -> "Instance":
        return Instance(self.n, self.owners, self.base_edges, self.altruist, as_probability(p))


class Digraph:
    """Sorted adjacency over a node subset; shared base of the full graph and views."""

    def __init__(self, instance: Instance, nodes: Iterable[int], edges: Iterable[tuple[int, int]]):
        self.instance = instance
        self.nodes: frozenset[int] = frozenset(nodes)
        succ: dict[int, list[int]] = {v: [] for v in self.nodes}
        kept = []
        for u, v in edges:
            if u in succ and v in self.nodes:
                succ[u].append(v)
                kept.append((u, v))
        self.edges: frozenset[tuple[int, int]] = frozenset(kept)
        self.succ: dict[int, tuple[int, ...]] = {u: tuple(sorted(vs)) for u, vs in succ.items()}

    @property
    def altruist(self) -> int:
        return self.instance.altruist

    @property
    def altruist_owner(self) -> int:
        return self.instance.altruist_owner

    @property
    def hospitals(self) -> tuple[int, ...]:
        return self.instance.hospitals

    def owner(self, v: int) -> int:
        return self.instance.owners[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    @cached_property
    def members(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(v for v in m if v in self.nodes) for m in self.instance.members)

    def internal_succ(self, hospital: int) -> dict[int, tuple[int, ...]]:
        """Adjacency of the hospital's internal subgraph (its present nodes, internal edges only)."""
        owners = self.instance.owners
        return {v: tuple(w for w in self.succ[v] if owners[w] == hospital) for v in self.members[hospital]}


class ViewGraph(Digraph):
    """What a mechanism sees: the subgraph induced by the reported nodes.

    Edge provenance is deliberately absent.
    """


class CompatibilityGraph(Digraph):
    """Base edges plus one realization of the random cross edges."""

    def __init__(self, instance: Instance, random_edges: Iterable[tuple[int, int]], seed: int | None = None):
        self.random_edges: frozenset[tuple[int, int]] = frozenset(random_edges)
        self.seed = seed
        for u, v in self.random_edges:
            if instance.owners[u] == instance.owners[v]:
                raise InstanceError(f"random edge ({u}, {v}) lies inside hospital {instance.owners[u]}")
        super().__init__(instance, range(instance.n), instance.base_edges | self.random_edges)

    def provenance(self, edge: tuple[int, int]) -> str:
        if edge in self.instance.base_edges:
            return "base"
        if edge in self.random_edges:
            return "random"
        raise KeyError(edge)

    @cached_property
    def full_view(self) -> ViewGraph:
        return view(self, Report.truthful(self.instance))


def edge_threshold(p: Fraction) -> int:
    """Integer threshold so that a 53-bit uniform draw ``u`` gives an edge iff ``u < threshold``."""
    return (p.numerator << 53) // p.denominator


def cross_pairs(instance: Instance) -> tuple[np.ndarray, np.ndarray]:
    owners = np.asarray(instance.owners)
    u, v = np.nonzero(owners[:, None] != owners[None, :])
    return u, v


def edge_draws(seed: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """53-bit uniform draws keyed by ``(seed, u, v)``; independent of evaluation order."""
    key = _splitmix64(np.array([seed & _MASK64], dtype=np.uint64))[0]
    x = (u.astype(np.uint64) << np.uint64(32)) | v.astype(np.uint64)
    return _splitmix64(_splitmix64(x) ^ key) >> np.uint64(11)


def sample_random_edges(instance: Instance, seed: int) -> CompatibilityGraph:
    """Draw E_p: each ordered cross-hospital pair is present independently with probability p."""
    p = instance.p
    if p == 0:
        return CompatibilityGraph(instance, (), seed)
    u, v = cross_pairs(instance)
    if p == 1:
        keep = np.ones(len(u), dtype=bool)
    else:
        keep = edge_draws(seed, u, v) < np.uint64(edge_threshold(p))
    return CompatibilityGraph(instance, zip(u[keep].tolist(), v[keep].tolist()), seed)


@dataclass(frozen=True)
class Report:
    """Declared node subset per hospital."""

    declared: Mapping[int, frozenset[int]] = field(default_factory=dict)

    @classmethod
    def truthful(cls, instance: Instance) -> "Report":
        return cls({h: frozenset(m) for h, m in enumerate(instance.members)})

    @classmethod
    def hiding(cls, instance: Instance, hospital: int, hidden: Iterable[int]) -> "Report":
        hidden = frozenset(hidden)
        declared = {h: frozenset(m) for h, m in enumerate(instance.members)}
        declared[hospital] = declared[hospital] - hidden
        return cls(declared)

    def validate(self, instance: Instance) -> None:
        for h, nodes in self.declared.items():
            if h not in instance.hospitals:
                raise InstanceError(f"report mentions unknown hospital {h}")
            stray = [v for v in nodes if not 0 <= v < instance.n or instance.owners[v] != h]
            if stray:
                raise InstanceError(f"hospital {h} declares nodes it does not own: {sorted(stray)}")
        if instance.altruist not in self.declared.get(instance.altruist_owner, ()):
            raise InstanceError("the altruist must always be reported")

    def nodes(self) -> frozenset[int]:
        return frozenset().union(*self.declared.values()) if self.declared else frozenset()


def view(graph: CompatibilityGraph, report: Report) -> ViewGraph:
    """Induced subgraph of the compatibility graph on the reported nodes."""
    report.validate(graph.instance)
    nodes = report.nodes()
    if len(nodes) == graph.instance.n:
        edges: Iterable[tuple[int, int]] = graph.edges
    else:
        edges = ((u, v) for u, v in graph.edges if u in nodes and v in nodes)
    return ViewGraph(graph.instance, nodes, edges)


def is_simple(path: Sequence[int]) -> bool:
    return len(set(path)) == len(path)


def is_valid_path(path: Sequence[int], graph: Digraph, start: int | None = None) -> bool:
    if not path:
        return False
    if start is not None and path[0] != start:
        return False
    if not is_simple(path) or any(v not in graph.nodes for v in path):
        return False
    return all(graph.has_edge(u, v) for u, v in zip(path, path[1:]))


def segments(path: Sequence[int], instance: Instance) -> list[tuple[int, Path]]:
    """Maximal ownership-contiguous blocks of a path, in order."""
    out: list[tuple[int, Path]] = []
    start = 0
    for k in range(1, len(path) + 1):
        if k == len(path) or instance.owners[path[k]] != instance.owners[path[start]]:
            out.append((instance.owners[path[start]], tuple(path[start:k])))
            start = k
    return out


def welfare(path: Sequence[int]) -> int:
    return len(path)


def utility(path: Sequence[int], hospital: int, instance: Instance) -> int:
    return sum(1 for v in path if instance.owners[v] == hospital)


def utilities(path: Sequence[int], instance: Instance) -> list[int]:
    out = [0] * len(instance.hospitals)
    for v in path:
        out[instance.owners[v]] += 1
    return out


@dataclass(frozen=True)
class PathSet:
    """Disjoint internal paths owned by one hospital."""

    owner: int
    paths: tuple[Path, ...] = ()

    @property
    def total_length(self) -> int:
        return sum(len(p) for p in self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def nodes(self) -> set[int]:
        return {v for p in self.paths for v in p}

    def validate(self, graph: Digraph) -> None:
        seen: set[int] = set()
        for p in self.paths:
            if not is_valid_path(p, graph):
                raise InstanceError(f"{p} is not a path of the graph")
            if any(graph.owner(v) != self.owner for v in p):
                raise InstanceError(f"{p} leaves hospital {self.owner}")
            if seen.intersection(p):
                raise InstanceError("paths in a PathSet must be vertex-disjoint")
            seen.update(p)
