"""Column partitioning: contiguous segmentation and iterative clustering.

Both produce a complete ClusterPlan: disjoint column segments (each at most
`width` wide, the number of array rows) with a streaming row order per
segment. Clustering alternates between assigning every column to the segment
whose current order streams it cheapest and re-solving each segment's order,
keeping a step only when it does not increase the total HD, so the recorded
objective never rises.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import ChannelOrder, ClusterPlan, InfeasibleError, Segment, WeightMatrix
from .metrics import column_hd_with_order, hd_with_order
from .reorder import exact_reorder, greedy_reorder

_HUGE = np.int64(1) << 60


@dataclass(frozen=True)
class ClusterTrace:
    """Objective value after initialization and after each iteration."""

    objectives: tuple[int, ...]
    iterations_run: int
    best_restart: int  # -1 when the contiguous-segmentation fallback won


def _solver(reorder_mode: str) -> Callable[[WeightMatrix, Sequence[int]], ChannelOrder]:
    if reorder_mode == "greedy":
        return lambda w, cols: greedy_reorder(w, cols, start=0)
    if reorder_mode == "exact":
        return lambda w, cols: exact_reorder(w, cols)
    raise ValueError(f"reorder_mode must be 'greedy' or 'exact', got {reorder_mode!r}")


def segment_then_reorder(w: WeightMatrix, width: int, reorder_mode: str = "greedy") -> ClusterPlan:
    """Chop columns into contiguous width-sized chunks and reorder each
    chunk's rows independently."""
    if not 1 <= width <= w.cols:
        raise ValueError(f"width must be in [1, C={w.cols}], got {width}")
    solve = _solver(reorder_mode)
    segments = []
    for lo in range(0, w.cols, width):
        cols = tuple(range(lo, min(lo + width, w.cols)))
        segments.append(Segment(cols, solve(w, cols)))
    return ClusterPlan(tuple(segments), width)


def _assignment_costs(w: WeightMatrix, orders: list[ChannelOrder]) -> np.ndarray:
    """cost[i, k] = HD of column i streamed under cluster k's current order."""
    return np.stack([column_hd_with_order(w, s) for s in orders], axis=1)


def _assign_columns(cost: np.ndarray, width: int) -> list[list[int]]:
    """Capacity-constrained assignment: columns claim their cheapest open
    cluster in order of largest best-vs-second-best regret first."""
    n_cols, t = cost.shape
    capacity = [width] * t
    open_mask = np.ones(t, dtype=bool)
    clusters: list[list[int]] = [[] for _ in range(t)]
    stamp = 0

    def best_and_regret(col: int) -> tuple[int, np.int64]:
        vals = np.where(open_mask, cost[col], _HUGE)
        k1 = int(np.argmin(vals))
        v1 = vals[k1]
        vals = vals.copy()
        vals[k1] = _HUGE
        return k1, np.min(vals) - v1

    heap = []
    for col in range(n_cols):
        k1, regret = best_and_regret(col)
        heap.append((-regret, col, k1, stamp))
    heapq.heapify(heap)
    while heap:
        neg_regret, col, k1, seen = heapq.heappop(heap)
        if seen != stamp:
            k1, regret = best_and_regret(col)
            heapq.heappush(heap, (-regret, col, k1, stamp))
            continue
        clusters[k1].append(col)
        capacity[k1] -= 1
        if capacity[k1] == 0:
            open_mask[k1] = False
            stamp += 1
    return clusters


def _repair_empty(clusters: list[list[int]], cost: np.ndarray) -> None:
    """Re-seed each empty cluster with the worst-fitting column of a donor."""
    for e, members in enumerate(clusters):
        if members:
            continue
        worst_col, worst_val, donor = -1, np.int64(-1), -1
        for k, other in enumerate(clusters):
            if len(other) < 2:
                continue
            for col in other:
                val = cost[col, k]
                if val > worst_val or (val == worst_val and col < worst_col):
                    worst_col, worst_val, donor = col, val, k
        if donor >= 0:
            clusters[donor].remove(worst_col)
            members.append(worst_col)


def _plan_from_clusters(
    clusters: list[list[int]], orders: list[ChannelOrder], width: int
) -> ClusterPlan:
    pairs = [
        (tuple(sorted(cols)), order)
        for cols, order in zip(clusters, orders)
        if cols
    ]
    pairs.sort(key=lambda p: p[0][0])
    return ClusterPlan(tuple(Segment(cols, order) for cols, order in pairs), width)


def cluster_then_reorder(
    w: WeightMatrix,
    t: int,
    width: int,
    iters: int = 20,
    seed: int = 0,
    restarts: int = 20,
    reorder_mode: str = "greedy",
) -> tuple[ClusterPlan, ClusterTrace]:
    """Alternating clustering of input-channel columns into t segments.

    Each restart seeds t random singleton clusters, assigns all columns to
    them, then iterates assignment/update `iters` times, accepting a step only
    if the total HD does not increase. The best plan over all restarts is
    returned, and the contiguous segmentation always competes as a final
    candidate, so the result is never worse than segment_then_reorder at the
    same width.
    """
    if t < 1 or iters < 1 or restarts < 1:
        raise ValueError("t, iters, and restarts must all be >= 1")
    if t * width < w.cols:
        raise InfeasibleError(
            f"capacity t*width = {t * width} cannot hold C = {w.cols} columns"
        )
    solve = _solver(reorder_mode)
    t_eff = min(t, w.cols)
    cache: dict[tuple[int, ...], ChannelOrder] = {}

    def solve_cached(cols: Sequence[int]) -> ChannelOrder:
        key = tuple(sorted(cols))
        order = cache.get(key)
        if order is None:
            order = cache[key] = solve(w, key)
        return order

    def objective(clusters: list[list[int]], orders: list[ChannelOrder]) -> int:
        return sum(
            hd_with_order(w, order, cols)
            for cols, order in zip(clusters, orders)
            if cols
        )

    best_plan: ClusterPlan | None = None
    best_obj = None
    best_trace: ClusterTrace | None = None
    child_seeds = np.random.SeedSequence(seed).spawn(restarts)
    for r in range(restarts):
        rng = np.random.default_rng(child_seeds[r])
        seeds = sorted(int(c) for c in rng.choice(w.cols, size=t_eff, replace=False))
        orders = [solve_cached([c]) for c in seeds]
        cost = _assignment_costs(w, orders)
        clusters = _assign_columns(cost, width)
        _repair_empty(clusters, cost)
        cur_obj = objective(clusters, orders)
        objectives = [cur_obj]
        for _ in range(iters):
            cand_cost = _assignment_costs(w, orders)
            cand_clusters = _assign_columns(cand_cost, width)
            _repair_empty(cand_clusters, cand_cost)
            cand_orders = [
                solve_cached(cols) if cols else orders[k]
                for k, cols in enumerate(cand_clusters)
            ]
            cand_obj = objective(cand_clusters, cand_orders)
            if cand_obj <= cur_obj:
                clusters, orders, cur_obj = cand_clusters, cand_orders, cand_obj
            objectives.append(cur_obj)
        if best_obj is None or cur_obj < best_obj:
            best_obj = cur_obj
            best_plan = _plan_from_clusters(clusters, orders, width)
            best_trace = ClusterTrace(tuple(objectives), iters, r)
    contiguous = segment_then_reorder(w, min(width, w.cols), reorder_mode)
    contiguous_obj = sum(hd_with_order(w, s.order, s.columns) for s in contiguous.segments)
    if contiguous_obj < best_obj:
        best_plan = ClusterPlan(contiguous.segments, width)
        best_trace = ClusterTrace(best_trace.objectives, iters, -1)
    assert best_plan is not None and best_trace is not None
    return best_plan, best_trace
