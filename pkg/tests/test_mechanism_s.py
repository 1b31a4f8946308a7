from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainmech.graph_core import CompatibilityGraph, Instance, PathSet, sample_random_edges
from chainmech.instances import FuzzConfig, gen_chains, gen_random_fuzz
from chainmech.mechanism_s import final_pathsets, order_paths, run_mechanism_s, select_special
from chainmech.mechanisms import check_outcome
from chainmech.params import MechParamsS, f_value
from chainmech.stitching import is_alternating

from conftest import instances


def test_params_rounding():
    assert MechParamsS.from_s(8, 100, 2) == MechParamsS(8, 4, 2, 2)
    assert MechParamsS.from_s(3, 100, 2) == MechParamsS(3, 2, 1, 2)
    # s' is raised to keep the stitch windows disjoint
    assert MechParamsS.from_s(17, 100, 3).s_prime == 5
    assert MechParamsS.from_s(64, 120).f_value == 4
    assert f_value(2) == 2 and f_value(10**6) == 13 and f_value(5, lambda n: 1) == 2


def test_no_internal_path_gives_altruist():
    inst = Instance(3, (0, 1, 1), {(0, 1), (1, 2)}, 0, Fraction(1))
    out = run_mechanism_s(sample_random_edges(inst, 0).full_view, 4)
    assert out.success and out.path == (0,) and out.branch == "trivial"


def test_two_chains_certain_edges():
    gen = gen_chains([[12], [12]], 1)
    g = sample_random_edges(gen.instance, 0).full_view
    out = run_mechanism_s(g, 8, f=2)
    assert out.success and out.branch == "stitched"
    assert out.welfare >= 12 * 2 - 2 * 2
    assert out.welfare == 24  # every tail-to-head edge exists, so nothing is trimmed
    assert check_outcome(out, g) == []


def test_two_chains_no_edges_fail():
    gen = gen_chains([[12], [12]], 0)
    g = sample_random_edges(gen.instance, 0).full_view
    out = run_mechanism_s(g, 8, f=2)
    assert not out.success and out.path == (0,)


def test_min_n_guard():
    gen = gen_chains([[12], [12]], 1)
    out = run_mechanism_s(sample_random_edges(gen.instance, 0).full_view, 8, f=2, n_min=100)
    assert out.path == (0,) and out.branch == "small_instance"


def test_special_selection_and_window():
    assert select_special({0: 2, 1: 3, 2: 3}) == 1
    gen = gen_chains([[24], [8], [8]], 1)
    g = sample_random_edges(gen.instance, 0).full_view
    out = run_mechanism_s(g, 8, f=2)
    sp = out.event("special")
    assert sp["hospital"] == 0 and (sp["lower"], sp["upper"]) == (2, 5)
    assert len(sp["paths"]) == 2  # ties in total length go to fewer paths
    assert sum(map(len, sp["paths"])) == 24


def test_order_when_altruist_owner_has_one_extra():
    sets = {0: PathSet(0, ((0, 1), (5, 6))), 1: PathSet(1, ((2, 3),))}
    out = order_paths(sets, 0)
    assert out[0] == (0, (0, 1))
    assert is_alternating([h for h, _ in out], cyclic=False)
    assert len(out) == 3


def test_trace_is_deterministic():
    gen = gen_chains([[30], [20], [20]], "0.3")
    g = sample_random_edges(gen.instance, 5).full_view
    assert run_mechanism_s(g, 16, f=2).trace_digest() == run_mechanism_s(g, 16, f=2).trace_digest()


def test_failure_rate_small_sample():
    # window of 2x2 pairs at p = 1/2 fails each stitch with probability 1/16
    gen = gen_chains([[8], [8]], "1/2")
    fails = sum(not run_mechanism_s(sample_random_edges(gen.instance, t).full_view, 8, f=2).success
                for t in range(400))
    assert fails / 400 < 0.3


def _chain_fuzz(seed):
    import random

    rng = random.Random(seed)
    sizes = tuple(rng.randint(6, 24) for _ in range(rng.choice([2, 3])))
    cfg = FuzzConfig(sizes, rng.randint(1, 4), 0.0, rng.choice([0, 0.02]), rng.choice(["0", "1/5", "1/2", "1"]))
    return gen_random_fuzz(cfg, seed)


@given(st.integers(0, 10**6), st.sampled_from([4, 8, 16]))
def test_invariants_on_chain_instances(seed, s):
    inst = _chain_fuzz(seed)
    g = sample_random_edges(inst, seed).full_view
    out = run_mechanism_s(g, s, f=2)
    assert check_outcome(out, g) == []
    if out.branch == "stitched":
        sets = final_pathsets(out)
        sp = out.params["s_prime"]
        assert all(len(p) >= sp for ps in sets.values() for p in ps)


@given(instances(max_n=8), st.integers(2, 6), st.integers(0, 100))
def test_invariants_on_small_instances(inst, s, seed):
    g = sample_random_edges(inst, seed).full_view
    out = run_mechanism_s(g, s, f=2)
    assert check_outcome(out, g) == []
    assert out.success or out.path == (0,)
