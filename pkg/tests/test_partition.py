import itertools

import numpy as np
import pytest

from hdopt import (
    InfeasibleError,
    WeightMatrix,
    cluster_then_reorder,
    exact_reorder,
    hd_plan,
    hd_with_order,
    segment_then_reorder,
)

from conftest import random_matrix


def brute_force_balanced_split(w, width):
    """Best total over all equal-width column splits with exact inner orders."""
    cols = range(w.cols)
    best = None
    for left in itertools.combinations(cols, width):
        if 0 not in left:
            continue  # each split counted once
        right = tuple(c for c in cols if c not in left)
        hd = hd_with_order(w, exact_reorder(w, left), left) + hd_with_order(
            w, exact_reorder(w, right), right
        )
        if best is None or hd < best[0]:
            best = (hd, frozenset((left, right)))
    return best


# --- segment_then_reorder ----------------------------------------------------

def test_segment_worked_example(w_c):
    plan = segment_then_reorder(w_c, 4, "exact")
    assert [seg.columns for seg in plan.segments] == [(0, 1, 2, 3), (4, 5, 6, 7)]
    assert hd_plan(w_c, plan).total_hd == 22


def test_segment_full_width_equals_plain_reorder(w_b):
    plan = segment_then_reorder(w_b, w_b.cols, "exact")
    assert len(plan.segments) == 1
    assert plan.segments[0].order == exact_reorder(w_b)


def test_segment_width_one_hits_per_column_optima():
    rng = np.random.default_rng(31)
    w = random_matrix(rng, 6, 7, 3)
    plan = segment_then_reorder(w, 1, "exact")
    assert len(plan.segments) == 7
    expected = sum(
        min(hd_with_order(w, perm, [c]) for perm in itertools.permutations(range(6)))
        for c in range(7)
    )
    assert hd_plan(w, plan).total_hd == expected


def test_segment_uneven_tail():
    rng = np.random.default_rng(32)
    w = random_matrix(rng, 4, 5, 2)
    plan = segment_then_reorder(w, 2)
    assert [seg.columns for seg in plan.segments] == [(0, 1), (2, 3), (4,)]


def test_segment_width_validation(w_b):
    with pytest.raises(ValueError):
        segment_then_reorder(w_b, 0)
    with pytest.raises(ValueError):
        segment_then_reorder(w_b, 5)
    with pytest.raises(ValueError):
        segment_then_reorder(w_b, 2, "annealed")


# --- cluster_then_reorder -----------------------------------------------------

def test_cluster_worked_example(w_c):
    plan, trace = cluster_then_reorder(
        w_c, t=2, width=4, iters=20, seed=0, restarts=20, reorder_mode="exact"
    )
    assert hd_plan(w_c, plan).total_hd == 16
    assert {frozenset(s.columns) for s in plan.segments} == {
        frozenset({0, 2, 4, 6}),
        frozenset({1, 3, 5, 7}),
    }
    assert len(trace.objectives) == trace.iterations_run + 1 == 21
    assert trace.best_restart >= 0


def test_cluster_matches_brute_force_optimum(w_c):
    best_hd, _ = brute_force_balanced_split(w_c, 4)
    assert best_hd == 16  # two splits reach it: {0,2,4,6}|{1,3,5,7} and {0,1,4,5}|{2,3,6,7}
    plan, _ = cluster_then_reorder(
        w_c, t=2, width=4, iters=20, seed=0, restarts=20, reorder_mode="exact"
    )
    assert hd_plan(w_c, plan).total_hd == best_hd


def test_cluster_constant_matrix():
    w = WeightMatrix("const", 2, np.full((5, 6), 3))
    plan, trace = cluster_then_reorder(w, t=2, width=3, iters=3, restarts=2)
    assert hd_plan(w, plan).total_hd == 0
    assert trace.objectives[-1] == 0


def test_cluster_trace_non_increasing_with_exact_inner():
    rng = np.random.default_rng(33)
    for seed in range(5):
        w = random_matrix(rng, 8, 12, 2)
        _, trace = cluster_then_reorder(
            w, t=4, width=3, iters=10, seed=seed, restarts=3, reorder_mode="exact"
        )
        objs = trace.objectives
        assert all(objs[i + 1] <= objs[i] for i in range(len(objs) - 1))


def test_cluster_final_not_above_initial_with_greedy_inner():
    rng = np.random.default_rng(34)
    for seed in range(5):
        w = random_matrix(rng, 10, 12, 3)
        _, trace = cluster_then_reorder(
            w, t=3, width=4, iters=8, seed=seed, restarts=4, reorder_mode="greedy"
        )
        assert trace.objectives[-1] <= trace.objectives[0]


def test_cluster_never_worse_than_segmentation():
    rng = np.random.default_rng(35)
    for seed in range(8):
        w = random_matrix(rng, 8, 8, 2)
        plan, trace = cluster_then_reorder(
            w, t=2, width=4, iters=5, seed=seed, restarts=3, reorder_mode="exact"
        )
        seg = segment_then_reorder(w, 4, "exact")
        assert hd_plan(w, plan).total_hd <= hd_plan(w, seg).total_hd
        if trace.best_restart == -1:
            assert hd_plan(w, plan).total_hd == hd_plan(w, seg).total_hd


def test_cluster_capacity_respected():
    rng = np.random.default_rng(36)
    w = random_matrix(rng, 6, 11, 2)
    plan, _ = cluster_then_reorder(w, t=4, width=3, iters=4, restarts=3)
    assert all(len(seg.columns) <= 3 for seg in plan.segments)
    assert plan.cols == 11


def test_cluster_infeasible_capacity(w_c):
    with pytest.raises(InfeasibleError):
        cluster_then_reorder(w_c, t=2, width=3)


def test_cluster_parameter_validation(w_c):
    with pytest.raises(ValueError):
        cluster_then_reorder(w_c, t=0, width=8)
    with pytest.raises(ValueError):
        cluster_then_reorder(w_c, t=2, width=4, iters=0)
    with pytest.raises(ValueError):
        cluster_then_reorder(w_c, t=2, width=4, restarts=0)


def test_cluster_more_seeds_than_columns():
    rng = np.random.default_rng(37)
    w = random_matrix(rng, 4, 3, 2)
    plan, _ = cluster_then_reorder(w, t=5, width=2, iters=3, restarts=2)
    assert plan.cols == 3
    assert len(plan.segments) <= 3


def test_cluster_width_larger_than_cols():
    rng = np.random.default_rng(38)
    w = random_matrix(rng, 5, 3, 2)
    plan, _ = cluster_then_reorder(w, t=1, width=8, iters=3, restarts=2)
    assert plan.cols == 3
    assert plan.width == 8


def test_cluster_seed_reproducibility(w_c):
    a = cluster_then_reorder(w_c, t=2, width=4, iters=5, seed=7, restarts=4)
    b = cluster_then_reorder(w_c, t=2, width=4, iters=5, seed=7, restarts=4)
    assert a[0] == b[0]
    assert a[1] == b[1]


def test_cluster_exact_inner_respects_channel_limit():
    w = WeightMatrix("tall", 1, np.zeros((13, 4), dtype=int))
    with pytest.raises(InfeasibleError):
        cluster_then_reorder(w, t=2, width=2, iters=2, restarts=1, reorder_mode="exact")
