"""Shared domain types plus JSON (de)serialization of weight bundles and plans.

All channel and column indices are 0-based everywhere, including in files.
Weight codes are raw unsigned B-bit patterns; nothing here assigns them a
signed interpretation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAX_BITS = 16


class ValidationError(ValueError):
    """Input violates a structural invariant (bad code, bad permutation, ...)."""


class InfeasibleError(ValueError):
    """Configuration cannot be realized on the modeled hardware."""


def _as_index_tuple(values: Iterable[int], what: str) -> tuple[int, ...]:
    out = []
    for v in values:
        iv = int(v)
        if iv != v:
            raise ValidationError(f"{what} contains non-integer {v!r}")
        out.append(iv)
    return tuple(out)


@dataclass(frozen=True)
class WeightMatrix:
    """A K x C grid of unsigned B-bit weight codes, streamed row by row."""

    name: str
    bits: int
    data: np.ndarray  # shape (K, C), int64, read-only

    def __post_init__(self):
        if not 1 <= self.bits <= MAX_BITS:
            raise ValidationError(f"bits must be in [1, {MAX_BITS}], got {self.bits}")
        arr = np.asarray(self.data, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"weight data must be a 2-D K x C grid, got shape {arr.shape}")
        limit = 1 << self.bits
        bad = np.argwhere((arr < 0) | (arr >= limit))
        if bad.size:
            r, c = bad[0]
            raise ValidationError(
                f"code out of range at row {r}, col {c}: {arr[r, c]} not in [0, {limit})"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        """K, the number of output channels."""
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        """C, the number of input channels (times any flattened filter taps)."""
        return self.data.shape[1]


@dataclass(frozen=True)
class LayerShape:
    """Convolution layer dimensions; fx*fy filter taps get flattened into C."""

    c_in: int
    k_out: int
    fx: int = 1
    fy: int = 1

    def __post_init__(self):
        if min(self.c_in, self.k_out, self.fx, self.fy) < 1:
            raise ValidationError(f"layer dims must all be >= 1: {self}")

    @property
    def flat_cols(self) -> int:
        return self.c_in * self.fx * self.fy


@dataclass(frozen=True)
class ChannelOrder:
    """A permutation of the K output channels: the streaming sequence."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = _as_index_tuple(self.order, "order")
        k = len(order)
        if sorted(order) != list(range(k)):
            raise ValidationError(f"order is not a permutation of 0..{k - 1}: {order}")
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    @classmethod
    def identity(cls, k: int) -> "ChannelOrder":
        return cls(tuple(range(k)))


def as_order(order: "ChannelOrder | Sequence[int]") -> ChannelOrder:
    return order if isinstance(order, ChannelOrder) else ChannelOrder(tuple(order))


@dataclass(frozen=True)
class Segment:
    """A group of input-channel columns streamed together, with its row order."""

    columns: tuple[int, ...]
    order: ChannelOrder

    def __post_init__(self):
        cols = _as_index_tuple(self.columns, "columns")
        if not cols:
            raise ValidationError("segment has no columns")
        if len(set(cols)) != len(cols):
            raise ValidationError(f"segment has duplicate columns: {cols}")
        if min(cols) < 0:
            raise ValidationError(f"segment has negative column index: {cols}")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "order", as_order(self.order))


@dataclass(frozen=True)
class ClusterPlan:
    """Disjoint column segments covering all of 0..C-1, each at most `width` wide."""

    segments: tuple[Segment, ...]
    width: int

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ValidationError("plan has no segments")
        if self.width < 1:
            raise ValidationError(f"width must be >= 1, got {self.width}")
        seen: set[int] = set()
        k = len(segments[0].order)
        for i, seg in enumerate(segments):
            if len(seg.columns) > self.width:
                raise ValidationError(
                    f"segment {i} has {len(seg.columns)} columns, exceeds width {self.width}"
                )
            if len(seg.order) != k:
                raise ValidationError("segments disagree on channel count K")
            overlap = seen.intersection(seg.columns)
            if overlap:
                raise ValidationError(f"column {min(overlap)} appears in more than one segment")
            seen.update(seg.columns)
        if seen != set(range(len(seen))):
            missing = sorted(set(range(max(seen) + 1)) - seen)
            raise ValidationError(f"segments do not cover a contiguous 0..C-1 range; missing {missing}")
        object.__setattr__(self, "segments", segments)

    @property
    def k(self) -> int:
        return len(self.segments[0].order)

    @property
    def cols(self) -> int:
        return sum(len(s.columns) for s in self.segments)

    def validate_for(self, w: WeightMatrix) -> None:
        if self.k != w.rows:
            raise ValidationError(f"plan is for K={self.k} channels, matrix has K={w.rows}")
        if self.cols != w.cols:
            raise ValidationError(f"plan covers {self.cols} columns, matrix has C={w.cols}")

    @classmethod
    def identity(cls, w: WeightMatrix, width: int | None = None) -> "ClusterPlan":
        """One segment holding every column in natural order, identity row order."""
        width = w.cols if width is None else width
        seg = Segment(tuple(range(w.cols)), ChannelOrder.identity(w.rows))
        return cls((seg,), width)


@dataclass(frozen=True)
class ArrayConfig:
    """Input-stationary array geometry and operand bit widths."""

    array_rows: int = 8
    array_cols: int = 8
    weight_bits: int = 4
    activation_bits: int = 8
    psum_bits: int = 32
    buffer_depth: int = 1024

    def __post_init__(self):
        if min(self.array_rows, self.array_cols, self.weight_bits,
               self.activation_bits, self.psum_bits, self.buffer_depth) < 1:
            raise ValidationError(f"array config fields must all be >= 1: {self}")


@dataclass(frozen=True)
class EnergyParams:
    """Relative energy units. Defaults: compute:propagate:sram = 1:2:6, reuse 16x."""

    compute_unit: float = 1.0
    propagate_unit: float = 2.0
    sram_unit: float = 6.0
    tau_weight: float = 16.0
    tau_input: float = 16.0
    tau_psum: float = 16.0
    flip_unit: float = 1.0
    # Bit-width weighting knobs for the analytical model; with both at 1.0 the
    # datapath:memory ratio under the defaults is 3 : 1.125 per MAC.
    datapath_scale: float = 1.0
    mem_scale: float = 1.0

    def __post_init__(self):
        vals = (self.compute_unit, self.propagate_unit, self.sram_unit,
                self.tau_weight, self.tau_input, self.tau_psum, self.flip_unit,
                self.datapath_scale, self.mem_scale)
        if any(v < 0 for v in vals):
            raise ValidationError(f"energy params must be non-negative: {self}")


# ---------------------------------------------------------------------------
# Serialization.
#
# Weight bundle: {"name": str, "bits": int, "shape": [K, C], "data": [K*C ints]}
# Plan file:     {"width": int, "segments": [{"columns": [...], "order": [...]}]}
# extra keys (e.g. "meta" on plans) are preserved on save, ignored on load.
# ---------------------------------------------------------------------------

def _read_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: expected a JSON object at top level")
    return obj


def _require(obj: dict, key: str, path) -> object:
    if key not in obj:
        raise ValidationError(f"{path}: missing required key {key!r}")
    return obj[key]


def load_weight_bundle(path) -> WeightMatrix:
    obj = _read_json(path)
    bits = _require(obj, "bits", path)
    shape = _require(obj, "shape", path)
    data = _require(obj, "data", path)
    name = str(obj.get("name", Path(path).stem))
    if (not isinstance(shape, list)) or len(shape) != 2:
        raise ValidationError(f"{path}: shape must be [K, C]")
    k, c = int(shape[0]), int(shape[1])
    if k < 1 or c < 1:
        raise ValidationError(f"{path}: shape entries must be >= 1, got {shape}")
    if len(data) != k * c:
        raise ValidationError(f"{path}: data has {len(data)} entries, expected K*C = {k * c}")
    arr = np.asarray(data, dtype=np.int64).reshape(k, c)
    return WeightMatrix(name=name, bits=int(bits), data=arr)


def save_weight_bundle(w: WeightMatrix, path) -> None:
    obj = {
        "name": w.name,
        "bits": w.bits,
        "shape": [w.rows, w.cols],
        "data": [int(v) for v in w.data.reshape(-1)],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def plan_to_obj(plan: ClusterPlan, meta: dict | None = None) -> dict:
    obj: dict = {
        "width": plan.width,
        "segments": [
            {"columns": list(seg.columns), "order": list(seg.order)}
            for seg in plan.segments
        ],
    }
    if meta:
        obj["meta"] = meta
    return obj


def save_plan(plan: ClusterPlan, path, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_obj(plan, meta), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_plan(path) -> ClusterPlan:
    obj = _read_json(path)
    width = int(_require(obj, "width", path))
    raw_segments = _require(obj, "segments", path)
    segments = []
    for i, rs in enumerate(raw_segments):
        if "columns" not in rs or "order" not in rs:
            raise ValidationError(f"{path}: segment {i} needs 'columns' and 'order'")
        segments.append(Segment(tuple(rs["columns"]), ChannelOrder(tuple(rs["order"]))))
    return ClusterPlan(tuple(segments), width)
