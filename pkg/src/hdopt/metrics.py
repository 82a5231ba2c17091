"""Hamming-distance metrics over codes, matrices, channel orders, and plans.

The streaming HD of a matrix is the number of bit flips seen at the array's
weight registers when rows are streamed consecutively: the sum over adjacent
row pairs of the per-column XOR popcounts. All arithmetic is exact integer
until the final NHD division.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ChannelOrder, ClusterPlan, ValidationError, WeightMatrix, as_order


def popcount(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(values, dtype=np.int64))


def hd_scalar(a: int, b: int, bits: int) -> int:
    """Bit flips between two B-bit codes: popcount of their XOR."""
    limit = 1 << bits
    if not (0 <= a < limit and 0 <= b < limit):
        raise ValidationError(f"codes must be in [0, {limit}): got {a}, {b}")
    return int(a ^ b).bit_count()


def hd_matrix(w: WeightMatrix) -> int:
    """Total bit flips streaming rows 0,1,...,K-1 in natural order."""
    if w.rows == 1:
        return 0
    return int(popcount(w.data[:-1] ^ w.data[1:]).sum())


def hd_with_order(
    w: WeightMatrix,
    order: ChannelOrder | Sequence[int],
    columns: Sequence[int] | None = None,
) -> int:
    """Bit flips streaming rows in the given order, restricted to `columns`."""
    order = as_order(order)
    if len(order) != w.rows:
        raise ValidationError(f"order has {len(order)} entries, matrix has K={w.rows}")
    idx = np.asarray(order.order, dtype=np.intp)
    sub = w.data if columns is None else w.data[:, np.asarray(columns, dtype=np.intp)]
    if w.rows == 1:
        return 0
    rows = sub[idx]
    return int(popcount(rows[:-1] ^ rows[1:]).sum())


def column_hd_with_order(w: WeightMatrix, order: ChannelOrder | Sequence[int]) -> np.ndarray:
    """Per-column bit flips under `order`; hd_with_order is its sum over a column set."""
    order = as_order(order)
    idx = np.asarray(order.order, dtype=np.intp)
    if w.rows == 1:
        return np.zeros(w.cols, dtype=np.int64)
    rows = w.data[idx]
    return popcount(rows[:-1] ^ rows[1:]).sum(axis=0)


def nhd(w: WeightMatrix) -> float:
    """HD normalized by C*(K-1)*B: the average flip probability per streamed bit."""
    if w.rows < 2:
        raise ValidationError("NHD is undefined for K=1 (zero denominator)")
    return hd_matrix(w) / (w.cols * (w.rows - 1) * w.bits)


@dataclass(frozen=True)
class HdReport:
    """Flip totals for a plan: per-segment streaming HD plus normalized total."""

    total_hd: int
    nhd: float
    per_segment: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"hd": self.total_hd, "nhd": self.nhd, "per_segment": list(self.per_segment)}


def hd_plan(w: WeightMatrix, plan: ClusterPlan) -> HdReport:
    """Per-segment streaming HD under each segment's order, summed."""
    plan.validate_for(w)
    per_segment = tuple(hd_with_order(w, seg.order, seg.columns) for seg in plan.segments)
    total = sum(per_segment)
    denom = w.cols * (w.rows - 1) * w.bits
    return HdReport(total_hd=total, nhd=(total / denom) if denom else 0.0, per_segment=per_segment)
