from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainmech.errors import PreconditionViolated
from chainmech.stitching import StitchPlan, arrange_alternating, is_alternating, stitch

import oracles


def edges(*pairs):
    s = set(pairs)
    return lambda u, v: (u, v) in s


def test_stitch_simple():
    res = stitch(StitchPlan(((0, (1, 2, 3)), (1, (4, 5, 6))), 1), edges((3, 4)))
    assert res.path == (1, 2, 3, 4, 5, 6) and res.stitches == ((3, 4),)


def test_stitch_truncates():
    res = stitch(StitchPlan(((0, (1, 2, 3)), (1, (4, 5, 6))), 2), edges((2, 5)))
    assert res.path == (1, 2, 5, 6)


def test_stitch_missing_edge():
    res = stitch(StitchPlan(((0, (1, 2, 3)), (1, (4, 5, 6))), 1), edges((2, 5)))
    assert not res.ok and res.failed_at == 1


def test_stitch_prefers_retention_then_smallest():
    plan = StitchPlan(((0, (1, 2, 3, 4)), (1, (5, 6, 7, 8))), 2)
    assert stitch(plan, edges((3, 5), (4, 6))).stitches == ((3, 5),)
    assert stitch(plan, edges((4, 5), (3, 5))).stitches == ((4, 5),)
    assert stitch(plan, edges((3, 6), (4, 7))).stitches == ((3, 6),)


def test_stitch_does_not_reach_into_previous_piece():
    # the middle piece shrinks to one node; the next tail window must not back up into the first piece
    plan = StitchPlan(((0, (1, 2, 3, 4)), (1, (5, 6)), (0, (9, 10))), 2)
    res = stitch(plan, edges((4, 6), (4, 9), (6, 10)))
    assert res.path == (1, 2, 3, 4, 6, 10)


def test_plan_validation():
    with pytest.raises(PreconditionViolated):
        StitchPlan(((0, (1, 2)), (0, (3, 4))), 1).validate()
    with pytest.raises(PreconditionViolated):
        StitchPlan(((0, (1, 2)), (1, ())), 1).validate()
    assert StitchPlan(((0, (1, 2)), (1, (3,))), 1).short_entries() == [1]
    StitchPlan(((0, ()), (1, (3, 4))), 1).validate()


def test_empty_first_entry_is_skipped():
    res = stitch(StitchPlan(((0, ()), (1, (3, 4)), (0, (5, 6))), 1), edges((4, 5)))
    assert res.path == (3, 4, 5, 6)


def test_arrange_examples():
    items = [(c, k) for k, c in enumerate("aabbc")]
    out = arrange_alternating(items)
    assert is_alternating([c for c, _ in out])
    assert sorted(out) == sorted(items)
    with pytest.raises(PreconditionViolated):
        arrange_alternating([("a", 0), ("a", 1), ("b", 2)])
    with pytest.raises(PreconditionViolated):
        arrange_alternating([("a", 0)])
    assert arrange_alternating([]) == []


def test_arrange_first():
    items = [(0, "x"), (1, "y"), (0, "z"), (1, "w")]
    out = arrange_alternating(items, first=2)
    assert out[0] == (0, "z") and is_alternating([c for c, _ in out])


def multisets(max_total):
    for total in range(1, max_total + 1):
        for parts in itertools.product(range(total + 1), repeat=min(total, 4)):
            if sum(parts) == total and list(parts) == sorted(parts, reverse=True) and parts[0] > 0:
                yield [c for c, m in enumerate(parts) for _ in range(m)]


def test_arrangement_agrees_with_permutation_oracle():
    for colors in multisets(9):
        items = [(c, k) for k, c in enumerate(colors)]
        possible = oracles.alternating_cycle_exists(colors)
        if possible:
            out = arrange_alternating(items)
            assert is_alternating([c for c, _ in out])
        else:
            with pytest.raises(PreconditionViolated):
                arrange_alternating(items)


@given(st.lists(st.integers(0, 5), min_size=2, max_size=30), st.data())
def test_arrangement_property(colors, data):
    items = [(c, k) for k, c in enumerate(colors)]
    n1 = max(colors.count(c) for c in set(colors))
    if n1 > len(colors) - n1:
        with pytest.raises(PreconditionViolated):
            arrange_alternating(items)
        return
    first = data.draw(st.integers(0, len(items) - 1))
    out = arrange_alternating(items, first=first)
    assert out[0] == items[first]
    assert sorted(out) == sorted(items)
    assert is_alternating([c for c, _ in out], cyclic=True)


@given(st.integers(1, 3), st.lists(st.integers(6, 10), min_size=2, max_size=5), st.randoms(use_true_random=False))
def test_stitched_path_is_ordered_subsequence(window, lengths, rnd):
    seq, nxt = [], 0
    for k, ln in enumerate(lengths):
        seq.append((k % 2, tuple(range(nxt, nxt + ln))))
        nxt += ln
    pairs = {(u, v) for u in range(nxt) for v in range(nxt) if rnd.random() < 0.3}
    res = stitch(StitchPlan(tuple(seq), window), lambda u, v: (u, v) in pairs)
    if res.ok:
        flat = [v for _, p in seq for v in p]
        assert list(res.path) == sorted(res.path, key=flat.index)
        assert len(res.path) >= sum(lengths) - 2 * window * (len(lengths) - 1)
        assert len(res.stitches) == len(lengths) - 1
