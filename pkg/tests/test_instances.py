from __future__ import annotations

from fractions import Fraction

import pytest

from chainmech.benchmarks import opt, pi_ir, sopt
from chainmech.errors import GeneratorError
from chainmech.graph_core import utility
from chainmech.instances import (
    FuzzConfig,
    base_graph,
    fuzz_corpus,
    gen_chains,
    gen_random_fuzz,
    gen_semirandom_ic,
    gen_semirandom_ir,
    gen_worst_case_ic,
    gen_worst_case_ir,
    sample_fuzz_config,
    simple_paths,
    _certify,
)

import oracles


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_worst_case_ir(k):
    gen = gen_worst_case_ir(k)
    assert gen.instance.n == 4 * k
    assert all(c.verified for c in gen.certificates)
    g = base_graph(gen.instance)
    assert sopt(g, k, limit=64).length == 3 * k
    assert pi_ir(g).length == 2 * k
    assert gen.instance.base_edges - {(u, u + 1) for u in range(4 * k)} == {(k - 1, 2 * k)}


def test_worst_case_ir_k4_sopt():
    assert gen_worst_case_ir(4).cert("sopt").value == 12


@pytest.mark.parametrize("k", [1, 2, 3])
def test_semirandom_ir(k):
    gen = gen_semirandom_ir(k)
    inst = gen.instance
    assert inst.n == 8 * k + 1
    g = base_graph(inst)
    assert oracles.benchmark_lengths(g, 1)[0] == 6 * k + 1
    assert oracles.benchmark_lengths(g, 1)[3] == 3 * k + 1
    # through a block: upper branch 3 own nodes, lower branch 4 nodes with 1 own node
    blocks = [p for p in simple_paths(g, 0) if len(p) > 1 and p[-1] == 6]
    assert sorted((len(p) - 1, utility(p[:-1], 0, inst)) for p in blocks) == [(3, 3), (4, 1)]


def test_semirandom_ir_k2_values():
    gen = gen_semirandom_ir(2)
    assert gen.instance.n == 17
    assert gen.cert("opt").value == 13 and gen.cert("pi_ir").value == 7


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_worst_case_ic(k):
    with_x = gen_worst_case_ic(k, True)
    without = gen_worst_case_ic(k, False)
    assert with_x.instance.n == 6 * k and without.instance.n == 6 * k - 1
    assert sopt(base_graph(with_x.instance), k, limit=64).length == 4 * k
    assert sopt(base_graph(without.instance), k, limit=64).length == 3 * k
    # without x, some path holds at least 2k + 1 nodes of the altruist owner
    assert max(utility(p, 0, without.instance) for p in simple_paths(base_graph(without.instance), 0)) >= 2 * k + 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_semirandom_ic(k):
    full = gen_semirandom_ic(k, True)
    cut = gen_semirandom_ic(k, False)
    assert full.instance.n == 6 * k and cut.instance.n == 5 * k
    assert opt(base_graph(full.instance), limit=64).length >= 4 * k
    best = opt(base_graph(cut.instance), limit=64).path
    assert utility(best, 1, cut.instance) == 0
    assert sum(1 for o in cut.instance.owners if o == 0) == 3 * k


def test_certificate_mismatch_raises():
    gen = gen_worst_case_ir(1)
    with pytest.raises(GeneratorError):
        _certify(gen.instance, "x", {}, [("opt", 99, "==", lambda g: opt(g).length)], 100)


def test_large_k_is_flagged_constructed():
    gen = gen_semirandom_ir(10, verify_limit=20)
    assert not gen.cert("opt").verified and gen.cert("opt").value == 61


def test_chains():
    gen = gen_chains([[5, 3], [4]], "1/3")
    assert gen.instance.n == 12 and gen.instance.p == Fraction(1, 3)
    assert gen.cert("pi_ir").value == 5 and gen.cert("pi_ir").verified
    assert gen.cert("sopt_upper").relation == "<="


def test_fuzz_density_zero_two_chains():
    inst = gen_random_fuzz(FuzzConfig((5, 5), 1, 0.0, 0.0, 0), 3)
    assert len(inst.base_edges) == 8
    assert all(inst.owners[u] == inst.owners[v] for u, v in inst.base_edges)


def test_fuzz_deterministic():
    cfg = sample_fuzz_config(7)
    assert gen_random_fuzz(cfg, 7) == gen_random_fuzz(cfg, 7)


def test_fuzz_corpus_valid():
    corpus = fuzz_corpus(200, 10)
    assert all(1 <= inst.n <= 10 for inst in corpus)
    assert all(inst.altruist == 0 and inst.owners[0] == 0 for inst in corpus)
