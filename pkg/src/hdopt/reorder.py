"""Output-channel reordering: greedy nearest-neighbor search plus an exact solver.

Picking the streaming order that minimizes total HD is an open-path TSP over
the K channels with pairwise row HD as the distance. The greedy heuristic
extends the sequence with the unused channel closest to the previous one;
the exact solver runs a Held-Karp subset DP, feasible up to K = 12.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import ChannelOrder, InfeasibleError, WeightMatrix
from .metrics import hd_with_order

EXACT_CHANNEL_LIMIT = 12


def pairwise_hd(w: WeightMatrix, columns: Sequence[int] | None = None) -> np.ndarray:
    """K x K matrix of row-to-row HD restricted to `columns`.

    Rows are expanded to 0/1 bit planes X so that HD(i,j) decomposes as
    n_i + n_j - 2 * (X X^T)(i, j); the Gram matrix goes through BLAS.
    """
    sub = w.data if columns is None else w.data[:, np.asarray(columns, dtype=np.intp)]
    shifts = np.arange(w.bits, dtype=np.int64)
    planes = ((sub[:, :, None] >> shifts) & 1).reshape(w.rows, -1).astype(np.float32)
    gram = planes @ planes.T
    ones = planes.sum(axis=1)
    dist = ones[:, None] + ones[None, :] - 2.0 * gram
    return np.rint(dist).astype(np.int64)


def greedy_reorder(
    w: WeightMatrix,
    columns: Sequence[int] | None = None,
    start: int = 0,
) -> ChannelOrder:
    """Nearest-neighbor order: repeatedly append the unused channel with the
    smallest HD to the previous one. Ties break to the lowest channel index."""
    k = w.rows
    if not 0 <= start < k:
        raise ValueError(f"start channel {start} out of range [0, {k})")
    dist = pairwise_hd(w, columns)
    order = [start]
    unused = np.ones(k, dtype=bool)
    unused[start] = False
    current = start
    for _ in range(k - 1):
        row = np.where(unused, dist[current], np.iinfo(np.int64).max)
        current = int(np.argmin(row))  # argmin returns the first = lowest index on ties
        order.append(current)
        unused[current] = False
    return ChannelOrder(tuple(order))


def _exact_order_from_dist(dist: np.ndarray, fix_start: bool) -> list[int]:
    """Held-Karp over subsets; returns the lexicographically smallest optimum.

    h[mask][j] = cheapest path that starts at j and visits exactly set(mask).
    """
    k = dist.shape[0]
    if k == 1:
        return [0]
    d = dist.tolist()
    full = (1 << k) - 1
    big = float("inf")
    h = [[big] * k for _ in range(full + 1)]
    members: list[list[int]] = [[] for _ in range(full + 1)]
    for mask in range(1, full + 1):
        members[mask] = [j for j in range(k) if mask & (1 << j)]
    for j in range(k):
        h[1 << j][j] = 0
    for mask in range(1, full + 1):
        bits = members[mask]
        if len(bits) < 2:
            continue
        for j in bits:
            rest = mask ^ (1 << j)
            dj = d[j]
            hr = h[rest]
            h[mask][j] = min(dj[kk] + hr[kk] for kk in members[rest])
    starts = [0] if fix_start else range(k)
    best = min(h[full][j] for j in starts)
    # walk front-first, always taking the smallest channel that still reaches
    # the optimum: that is the lexicographically smallest optimal order
    cur = next(j for j in starts if h[full][j] == best)
    order = [cur]
    mask = full
    while mask != (1 << cur):
        rest = mask ^ (1 << cur)
        target = h[mask][cur]
        nxt = next(kk for kk in members[rest] if d[cur][kk] + h[rest][kk] == target)
        order.append(nxt)
        mask = rest
        cur = nxt
    return order


def exact_reorder(
    w: WeightMatrix,
    columns: Sequence[int] | None = None,
    fix_start: bool = False,
) -> ChannelOrder:
    """Optimal order over all K! sequences (or (K-1)! with `fix_start`).

    Guarded at K <= 12: beyond that the subset DP outgrows desk scale.
    """
    if w.rows > EXACT_CHANNEL_LIMIT:
        raise InfeasibleError(
            f"exact reorder supports K <= {EXACT_CHANNEL_LIMIT}, got K={w.rows}"
        )
    dist = pairwise_hd(w, columns)
    return ChannelOrder(tuple(_exact_order_from_dist(dist, fix_start)))


def reorder_with_fallback(
    w: WeightMatrix,
    columns: Sequence[int] | None = None,
    restarts: int = 1,
) -> ChannelOrder:
    """Best of greedy runs from `restarts` distinct start channels and the
    identity order, so the result never streams worse than the unoptimized
    matrix. Ties: lowest HD first, then lexicographically smallest order."""
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    candidates = [greedy_reorder(w, columns, start=s) for s in range(min(restarts, w.rows))]
    candidates.append(ChannelOrder.identity(w.rows))
    scored = [(hd_with_order(w, cand, columns), cand.order) for cand in candidates]
    scored.sort()
    return ChannelOrder(scored[0][1])
