import itertools

import numpy as np
import pytest

from hdopt import (
    ChannelOrder,
    ClusterPlan,
    Segment,
    ValidationError,
    WeightMatrix,
    column_hd_with_order,
    exact_reorder,
    hd_matrix,
    hd_plan,
    hd_scalar,
    hd_with_order,
    nhd,
)

from conftest import random_matrix


def naive_hd_rows(a, b, bits) -> int:
    return sum(((int(x) ^ int(y)) & ((1 << bits) - 1)).bit_count() for x, y in zip(a, b))


# --- hd_scalar --------------------------------------------------------------

def test_hd_scalar_examples():
    assert hd_scalar(0b00, 0b11, 2) == 2
    assert hd_scalar(9, 9, 4) == 0
    assert hd_scalar(0b1010, 0b0101, 4) == 4


def test_hd_scalar_range_check():
    with pytest.raises(ValidationError):
        hd_scalar(4, 0, 2)
    with pytest.raises(ValidationError):
        hd_scalar(0, -1, 2)


def test_hd_scalar_is_a_metric_on_4bit_codes():
    codes = range(16)
    for a, b in itertools.product(codes, repeat=2):
        assert hd_scalar(a, b, 4) == hd_scalar(b, a, 4)
        assert (hd_scalar(a, b, 4) == 0) == (a == b)
    for a, b, c in itertools.product(codes, repeat=3):
        assert hd_scalar(a, c, 4) <= hd_scalar(a, b, 4) + hd_scalar(b, c, 4)


# --- hd_matrix ---------------------------------------------------------------

def test_hd_matrix_worked_examples(w_a, w_b):
    assert hd_matrix(w_a) == 24
    assert hd_matrix(w_b) == 12


def test_hd_matrix_single_row():
    assert hd_matrix(WeightMatrix("r", 3, [[1, 5, 7]])) == 0


def test_hd_matrix_matches_naive_oracle():
    rng = np.random.default_rng(11)
    for _ in range(50):
        k, c, bits = rng.integers(1, 9), rng.integers(1, 9), rng.integers(1, 9)
        w = random_matrix(rng, int(k), int(c), int(bits))
        expected = sum(
            naive_hd_rows(w.data[j], w.data[j + 1], w.bits) for j in range(w.rows - 1)
        )
        assert hd_matrix(w) == expected


# --- hd_with_order ------------------------------------------------------------

def test_hd_with_order_worked_examples(w_a, w_b):
    assert hd_with_order(w_a, [0, 2, 1, 3]) == 8
    assert hd_with_order(w_b, [0, 2, 1, 3]) == 4


def test_hd_with_order_identity_matches_hd_matrix():
    rng = np.random.default_rng(12)
    for _ in range(20):
        w = random_matrix(rng, int(rng.integers(1, 10)), int(rng.integers(1, 10)), 4)
        assert hd_with_order(w, ChannelOrder.identity(w.rows)) == hd_matrix(w)


def test_hd_with_order_column_separability():
    rng = np.random.default_rng(13)
    for _ in range(20):
        w = random_matrix(rng, 6, 8, 3)
        order = list(rng.permutation(6))
        cols = sorted(rng.choice(8, size=5, replace=False).tolist())
        total = hd_with_order(w, order, cols)
        assert total == sum(hd_with_order(w, order, [c]) for c in cols)
        shuffled = list(cols)
        rng.shuffle(shuffled)
        assert hd_with_order(w, order, shuffled) == total


def test_hd_with_order_rejects_wrong_length(w_a):
    with pytest.raises(ValidationError):
        hd_with_order(w_a, [0, 1, 2])


def test_column_hd_matches_singleton_sums():
    rng = np.random.default_rng(14)
    w = random_matrix(rng, 7, 9, 4)
    order = list(rng.permutation(7))
    per_col = column_hd_with_order(w, order)
    assert per_col.shape == (9,)
    for c in range(9):
        assert per_col[c] == hd_with_order(w, order, [c])


# --- hd_plan -------------------------------------------------------------------

def test_hd_plan_segment_vs_cluster_examples(w_c):
    seg_plan = ClusterPlan(
        (
            Segment((0, 1, 2, 3), exact_reorder(w_c, (0, 1, 2, 3))),
            Segment((4, 5, 6, 7), exact_reorder(w_c, (4, 5, 6, 7))),
        ),
        width=4,
    )
    report = hd_plan(w_c, seg_plan)
    assert report.total_hd == 22
    assert sum(report.per_segment) == report.total_hd

    cluster_plan = ClusterPlan(
        (
            Segment((0, 2, 4, 6), exact_reorder(w_c, (0, 2, 4, 6))),
            Segment((1, 3, 5, 7), exact_reorder(w_c, (1, 3, 5, 7))),
        ),
        width=4,
    )
    assert hd_plan(w_c, cluster_plan).total_hd == 16


def test_hd_plan_constant_matrix_is_zero():
    w = WeightMatrix("const", 3, np.full((5, 6), 5))
    plan = ClusterPlan(
        (
            Segment((0, 2, 4), ChannelOrder((4, 2, 0, 1, 3))),
            Segment((1, 3, 5), ChannelOrder.identity(5)),
        ),
        width=3,
    )
    report = hd_plan(w, plan)
    assert report.total_hd == 0
    assert report.nhd == 0.0


def test_hd_plan_trivial_plan_matches_hd_matrix(w_b):
    report = hd_plan(w_b, ClusterPlan.identity(w_b))
    assert report.total_hd == hd_matrix(w_b)
    assert report.nhd == nhd(w_b)


def test_hd_plan_shape_mismatch(w_b, w_c):
    with pytest.raises(ValidationError):
        hd_plan(w_b, ClusterPlan.identity(w_c))


def test_hd_report_to_dict(w_b):
    d = hd_plan(w_b, ClusterPlan.identity(w_b)).to_dict()
    assert d == {"hd": 12, "nhd": 0.5, "per_segment": [12]}


# --- nhd -------------------------------------------------------------------------

def test_nhd_examples(w_a):
    assert nhd(w_a) == 1.0
    assert nhd(WeightMatrix("const", 4, np.full((3, 3), 9))) == 0.0


def test_nhd_rejects_single_row():
    with pytest.raises(ValidationError):
        nhd(WeightMatrix("r", 2, [[0, 1]]))


def test_nhd_bounds_and_order_bound():
    rng = np.random.default_rng(15)
    for _ in range(20):
        w = random_matrix(rng, int(rng.integers(2, 9)), int(rng.integers(1, 9)), 4)
        assert 0.0 <= nhd(w) <= 1.0
        order = list(rng.permutation(w.rows))
        assert 0 <= hd_with_order(w, order) <= w.cols * (w.rows - 1) * w.bits
