"""Instance families: lower-bound constructions, chain layouts and random fuzz instances.

Hospital ids follow the constructions' numbering shifted by one: the
altruist owner is hospital 0 and the altruist is node 0.  Every family
attaches certificates (benchmark values implied by the construction); when
the base graph is small enough they are recomputed with the exact solvers
and a mismatch raises ``GeneratorError``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .benchmarks import longest_internal_path, opt, pi_ir, sopt
from .errors import GeneratorError
from .graph_core import CompatibilityGraph, Digraph, Instance, Path, as_probability, utility

VERIFY_LIMIT = 48

_RELATIONS: dict[str, Callable[[int, int], bool]] = {
    "==": lambda got, want: got == want,
    ">=": lambda got, want: got >= want,
    "<=": lambda got, want: got <= want,
}


@dataclass(frozen=True)
class Certificate:
    name: str
    value: int
    relation: str = "=="
    verified: bool = False

    def holds(self, measured: int) -> bool:
        return _RELATIONS[self.relation](measured, self.value)

    def record(self) -> dict:
        return {"value": self.value, "relation": self.relation, "verified": self.verified}


@dataclass(frozen=True)
class Generated:
    instance: Instance
    family: str
    params: dict
    certificates: tuple[Certificate, ...] = ()

    def cert(self, name: str) -> Certificate:
        for c in self.certificates:
            if c.name == name:
                return c
        raise KeyError(name)

    def certificates_record(self) -> dict:
        return {"family": self.family, "params": self.params,
                **{c.name: c.record() for c in self.certificates}}


def base_graph(instance: Instance) -> CompatibilityGraph:
    """The graph without random edges (the p = 0 realization)."""
    return CompatibilityGraph(instance, ())


def simple_paths(graph: Digraph, start: int) -> Iterator[Path]:
    """Every simple path from ``start`` (exponential; small graphs only)."""
    path = [start]
    on = {start}

    def rec() -> Iterator[Path]:
        yield tuple(path)
        for w in graph.succ[path[-1]]:
            if w not in on:
                path.append(w)
                on.add(w)
                yield from rec()
                on.discard(w)
                path.pop()

    return rec()


def _certify(
    instance: Instance,
    family: str,
    params: dict,
    claims: Sequence[tuple[str, int, str, Callable[[CompatibilityGraph], int]]],
    verify_limit: int,
) -> Generated:
    graph = base_graph(instance)
    certs = []
    for name, value, rel, measure in claims:
        verified = False
        if instance.n <= verify_limit:
            got = measure(graph)
            if not _RELATIONS[rel](got, value):
                raise GeneratorError(f"{family} {params}: {name} measured {got}, construction claims {rel} {value}")
            verified = True
        certs.append(Certificate(name, value, rel, verified))
    return Generated(instance, family, params, tuple(certs))


class _Builder:
    def __init__(self):
        self.owners: list[int] = []
        self.edges: set[tuple[int, int]] = set()

    def node(self, hospital: int) -> int:
        self.owners.append(hospital)
        return len(self.owners) - 1

    def chain(self, hospital: int, length: int) -> list[int]:
        nodes = [self.node(hospital) for _ in range(length)]
        self.path(nodes)
        return nodes

    def path(self, nodes: Sequence[int]) -> None:
        self.edges.update(zip(nodes, nodes[1:]))

    def build(self, p=0) -> Instance:
        return Instance(len(self.owners), tuple(self.owners), frozenset(self.edges), 0, as_probability(p))


def gen_worst_case_ir(k: int, p=0, verify_limit: int = VERIFY_LIMIT) -> Generated:
    """Altruist chain of ``2k`` nodes; its ``k``-th node also enters the other hospital's ``2k`` chain."""
    if k < 1:
        raise ValueError("k must be positive")
    b = _Builder()
    own = b.chain(0, 2 * k)
    other = b.chain(1, 2 * k)
    b.edges.add((own[k - 1], other[0]))
    inst = b.build(p)

    def max_own_on_long(g: CompatibilityGraph) -> int:
        return max((utility(q, 0, inst) for q in simple_paths(g, 0) if len(q) > 2 * k), default=0)

    claims = [
        ("sopt", 3 * k, "==", lambda g: sopt(g, k, limit=inst.n).length),
        ("pi_ir", 2 * k, "==", lambda g: pi_ir(g, limit=inst.n).length),
        ("max_owner_utility_on_paths_longer_than_2k", k, "==", max_own_on_long),
    ]
    return _certify(inst, "worst_case_ir", {"k": k, "p": str(inst.p), "s": k}, claims, verify_limit)


def gen_semirandom_ir(k: int, p=0, verify_limit: int = VERIFY_LIMIT) -> Generated:
    """``k`` blocks, each an altruist-owner entry node that continues either through
    two more of its own nodes or through three nodes of hospital 1; after the
    blocks, a hospital-1 chain of ``k`` nodes, then an altruist-owner chain of ``k``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    b = _Builder()
    entry = b.node(0)
    for _ in range(k):
        upper = [b.node(0) for _ in range(2)]
        lower = [b.node(1) for _ in range(3)]
        nxt = b.node(0)
        b.path([entry, *upper, nxt])
        b.path([entry, *lower, nxt])
        entry = nxt
    tail1 = b.chain(1, k)
    tail0 = b.chain(0, k)
    b.path([entry, tail1[0]])
    b.path([tail1[-1], tail0[0]])
    inst = b.build(p)
    claims = [
        ("opt", 6 * k + 1, "==", lambda g: opt(g, limit=inst.n).length),
        ("pi_ir", 3 * k + 1, "==", lambda g: pi_ir(g, limit=inst.n).length),
    ]
    return _certify(inst, "semirandom_ir", {"k": k, "p": str(inst.p)}, claims, verify_limit)


def gen_worst_case_ic(k: int, include_x: bool = True, p=0, verify_limit: int = VERIFY_LIMIT) -> Generated:
    """Altruist-owner chain of ``3k`` nodes; after its ``k``-th node an extra own node ``x``
    leads into a hospital-1 chain of ``3k - 1`` nodes.  Without ``x`` that chain is unreachable.
    """
    if k < 1:
        raise ValueError("k must be positive")
    b = _Builder()
    own = b.chain(0, 3 * k)
    x = b.node(0) if include_x else None
    other = b.chain(1, 3 * k - 1)
    if x is not None:
        b.path([own[k - 1], x, other[0]])
    inst = b.build(p)

    def owner_utility_when_2k_other(g: CompatibilityGraph) -> int:
        vals = {utility(q, 0, inst) for q in simple_paths(g, 0) if utility(q, 1, inst) >= 2 * k}
        return max(vals) if vals else 0

    if include_x:
        claims = [
            ("sopt", 4 * k, "==", lambda g: sopt(g, k, limit=inst.n).length),
            ("owner_utility_with_2k_other_nodes", k + 1, "==", owner_utility_when_2k_other),
        ]
    else:
        claims = [
            ("sopt", 3 * k, "==", lambda g: sopt(g, k, limit=inst.n).length),
            ("pi_ir", 3 * k, "==", lambda g: pi_ir(g, limit=inst.n).length),
        ]
    params = {"k": k, "include_x": include_x, "p": str(inst.p), "s": k}
    return _certify(inst, "worst_case_ic", params, claims, verify_limit)


def gen_semirandom_ic(k: int, include_squares: bool = True, p=0, verify_limit: int = VERIFY_LIMIT) -> Generated:
    """``k`` blocks entered at an altruist-owner node: either two more own nodes
    (3 welfare, 3 owner nodes) or a square own node followed by two hospital-1
    nodes (4 welfare, 2 owner nodes).  Removing the squares cuts hospital 1 off.
    """
    if k < 1:
        raise ValueError("k must be positive")
    b = _Builder()
    entry = b.node(0)
    for blk in range(k):
        upper = [b.node(0) for _ in range(2)]
        square = b.node(0) if include_squares else None
        lower = [b.node(1) for _ in range(2)]
        nxt = b.node(0) if blk < k - 1 else None
        ends = [nxt] if nxt is not None else []
        b.path([entry, *upper, *ends])
        if square is not None:
            b.path([entry, square, *lower, *ends])
        else:
            b.path([*lower, *ends])
        if nxt is not None:
            entry = nxt
    inst = b.build(p)

    def other_utility_of_opt(g: CompatibilityGraph) -> int:
        return utility(opt(g, limit=inst.n).path, 1, inst)

    if include_squares:
        claims = [("opt", 4 * k, ">=", lambda g: opt(g, limit=inst.n).length)]
    else:
        claims = [
            ("opt", 3 * k, "==", lambda g: opt(g, limit=inst.n).length),
            ("other_utility_of_opt", 0, "==", other_utility_of_opt),
        ]
    params = {"k": k, "include_squares": include_squares, "p": str(inst.p)}
    return _certify(inst, "semirandom_ic", params, claims, verify_limit)


def gen_chains(lengths: Sequence[Sequence[int]], p=0, verify_limit: int = VERIFY_LIMIT) -> Generated:
    """Hospital ``h`` owns disjoint internal chains of the given lengths; no base cross edges.

    The altruist starts hospital 0's first chain.  Certificates: the longest
    altruist-owner path equals that chain, and every benchmark is at most ``n``.
    """
    if not lengths or not lengths[0] or any(x < 1 for ls in lengths for x in ls):
        raise ValueError("need positive chain lengths and at least one chain for hospital 0")
    b = _Builder()
    for h, ls in enumerate(lengths):
        for x in ls:
            b.chain(h, x)
    inst = b.build(p)
    claims = [("pi_ir", lengths[0][0], "==", lambda g: pi_ir(g).length)]
    gen = _certify(inst, "chains", {"lengths": [list(ls) for ls in lengths], "p": str(inst.p)}, claims, inst.n)
    return Generated(inst, gen.family, gen.params,
                     gen.certificates + (Certificate("sopt_upper", inst.n, "<=", False),))


@dataclass(frozen=True)
class FuzzConfig:
    """Random instance shape.

    Each hospital's nodes are shuffled and cut into up to ``max_chains``
    internal chains; every other ordered internal pair becomes an edge with
    probability ``internal_density`` and every ordered cross pair a base edge
    with probability ``cross_density``.
    """

    hospital_sizes: tuple[int, ...] = (4, 4)
    max_chains: int = 2
    internal_density: float = 0.1
    cross_density: float = 0.05
    p: Fraction = field(default=Fraction(3, 10))

    def __post_init__(self):
        object.__setattr__(self, "hospital_sizes", tuple(self.hospital_sizes))
        object.__setattr__(self, "p", as_probability(self.p))
        if not self.hospital_sizes or min(self.hospital_sizes) < 1:
            raise ValueError("every hospital needs at least one node")
        if self.max_chains < 1:
            raise ValueError("max_chains must be positive")


def gen_random_fuzz(config: FuzzConfig, seed: int) -> Instance:
    rng = random.Random(seed)
    b = _Builder()
    groups = []
    for h, size in enumerate(config.hospital_sizes):
        groups.append([b.node(h) for _ in range(size)])
    for nodes in groups:
        order = nodes[1:] if nodes[0] == 0 else list(nodes)
        rng.shuffle(order)
        if nodes[0] == 0:
            order = [0] + order
        cuts = sorted(rng.sample(range(1, len(order)), min(len(order) - 1, rng.randrange(config.max_chains))))
        for lo, hi in zip([0] + cuts, cuts + [len(order)]):
            b.path(order[lo:hi])
        for u in nodes:
            for v in nodes:
                if u != v and rng.random() < config.internal_density:
                    b.edges.add((u, v))
    for g1 in range(len(groups)):
        for g2 in range(len(groups)):
            if g1 == g2:
                continue
            for u in groups[g1]:
                for v in groups[g2]:
                    if rng.random() < config.cross_density:
                        b.edges.add((u, v))
    return b.build(config.p)


def sample_fuzz_config(seed: int, n_max: int = 10, hospitals: Sequence[int] = (2, 3)) -> FuzzConfig:
    """A varied fuzz configuration with at most ``n_max`` nodes."""
    rng = random.Random(f"fuzz-config/{seed}")
    h = rng.choice(list(hospitals))
    n = rng.randint(max(h, 2), n_max)
    cuts = sorted(rng.sample(range(1, n), h - 1))
    sizes = tuple(hi - lo for lo, hi in zip([0] + cuts, cuts + [n]))
    return FuzzConfig(
        hospital_sizes=sizes,
        max_chains=rng.randint(1, 3),
        internal_density=rng.choice([0.0, 0.1, 0.2, 0.35]),
        cross_density=rng.choice([0.0, 0.05, 0.15]),
        p=rng.choice([Fraction(0), Fraction(1, 5), Fraction(1, 2), Fraction(1)]),
    )


def fuzz_corpus(count: int, n_max: int = 10, seed0: int = 0, hospitals: Sequence[int] = (2, 3)) -> list[Instance]:
    return [gen_random_fuzz(sample_fuzz_config(seed0 + t, n_max, hospitals), seed0 + t) for t in range(count)]


FAMILIES = {
    "worst_case_ir": gen_worst_case_ir,
    "semirandom_ir": gen_semirandom_ir,
    "worst_case_ic": gen_worst_case_ic,
    "semirandom_ic": gen_semirandom_ic,
}
