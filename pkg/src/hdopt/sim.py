"""Register-level simulation of streaming a plan into an input-stationary array.

Activations for a segment's columns sit in the array rows; weight codes stream
through per-row registers one output channel per cycle. Every register input
transition is counted as bit flips, partial sums land in an accumulation
buffer addressed through the segment's streaming order (so outputs come back
in original channel addresses), and the accumulated outputs are bit-exact
equal to the plain matrix product no matter how the plan shuffles columns and
rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    MAX_BITS,
    ArrayConfig,
    ClusterPlan,
    EnergyParams,
    InfeasibleError,
    ValidationError,
    WeightMatrix,
    _read_json,
    _require,
)
from .metrics import popcount


@dataclass(frozen=True)
class ActivationSet:
    """P column vectors of C unsigned activation codes, pre-filled per array row."""

    bits: int
    data: np.ndarray  # shape (C, P), int64, read-only

    def __post_init__(self):
        if not 1 <= self.bits <= MAX_BITS:
            raise ValidationError(f"bits must be in [1, {MAX_BITS}], got {self.bits}")
        arr = np.asarray(self.data, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(
                f"activation data must be a 2-D C x P grid, got shape {arr.shape}"
            )
        limit = 1 << self.bits
        bad = np.argwhere((arr < 0) | (arr >= limit))
        if bad.size:
            r, c = bad[0]
            raise ValidationError(
                f"activation out of range at channel {r}, vector {c}: "
                f"{arr[r, c]} not in [0, {limit})"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def vectors(self) -> int:
        return self.data.shape[1]


def load_activation_set(path) -> ActivationSet:
    obj = _read_json(path)
    bits = _require(obj, "bits", path)
    shape = _require(obj, "shape", path)
    data = _require(obj, "data", path)
    if (not isinstance(shape, list)) or len(shape) != 2:
        raise ValidationError(f"{path}: shape must be [C, P]")
    c, p = int(shape[0]), int(shape[1])
    if c < 1 or p < 1:
        raise ValidationError(f"{path}: shape entries must be >= 1, got {shape}")
    if len(data) != c * p:
        raise ValidationError(f"{path}: data has {len(data)} entries, expected C*P = {c * p}")
    arr = np.asarray(data, dtype=np.int64).reshape(c, p)
    return ActivationSet(bits=int(bits), data=arr)


def save_activation_set(acts: ActivationSet, path) -> None:
    obj = {
        "bits": acts.bits,
        "shape": [acts.channels, acts.vectors],
        "data": [int(v) for v in acts.data.reshape(-1)],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


@dataclass(frozen=True)
class StreamReport:
    """Flip counts, accumulated outputs, and energy figures for one stream."""

    in_segment_flips: int
    boundary_flips: int
    outputs: np.ndarray  # shape (K, P), int64, read-only
    energy: float  # flip_unit x total flips
    mem_energy: float

    def __post_init__(self):
        arr = np.asarray(self.outputs, dtype=np.int64).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "outputs", arr)

    @property
    def total_flips(self) -> int:
        return self.in_segment_flips + self.boundary_flips

    def to_dict(self) -> dict:
        return {
            "in_segment_flips": self.in_segment_flips,
            "boundary_flips": self.boundary_flips,
            "total_flips": self.total_flips,
            "outputs": [[int(v) for v in row] for row in self.outputs],
            "energy": self.energy,
            "mem_energy": self.mem_energy,
        }


def estimate_energy(
    ops: int,
    params: EnergyParams = EnergyParams(),
    flips: int = 0,
    mode: str = "analytical",
) -> tuple[float, float]:
    """Return (datapath, memory) energy in relative units for `ops` MACs.

    analytical: datapath = ops x (compute + propagate) x datapath_scale;
    empirical: datapath = flip_unit x flips. Memory traffic is discounted by
    the reuse factors tau (each operand fetched once per tau MACs).
    """
    if ops < 0 or flips < 0:
        raise ValidationError("ops and flips must be non-negative")
    if min(params.tau_weight, params.tau_input, params.tau_psum) <= 0:
        raise ValidationError("tau reuse factors must be positive")
    if mode == "analytical":
        datapath = ops * (params.compute_unit + params.propagate_unit) * params.datapath_scale
    elif mode == "empirical":
        datapath = params.flip_unit * flips
    else:
        raise ValueError(f"mode must be 'analytical' or 'empirical', got {mode!r}")
    accesses = 1.0 / params.tau_weight + 1.0 / params.tau_input + 1.0 / params.tau_psum
    mem = ops * accesses * params.sram_unit * params.mem_scale
    return datapath, mem


def simulate_stream(
    w: WeightMatrix,
    plan: ClusterPlan,
    acts: ActivationSet,
    cfg: ArrayConfig = ArrayConfig(),
    params: EnergyParams = EnergyParams(),
) -> StreamReport:
    """Stream every segment of `plan` through the array and count register flips.

    Flips between consecutive streamed rows of one segment are in-segment
    flips; flips when a new segment's first row overwrites the previous
    segment's last row are boundary flips. The first row of the first segment
    loads into reset registers and is not counted.
    """
    plan.validate_for(w)
    if acts.channels != w.cols:
        raise ValidationError(
            f"activation set has {acts.channels} channels, weights have {w.cols} columns"
        )
    if w.bits > cfg.weight_bits:
        raise ValidationError(f"{w.bits}-bit weights exceed {cfg.weight_bits}-bit datapath")
    if acts.bits > cfg.activation_bits:
        raise ValidationError(
            f"{acts.bits}-bit activations exceed {cfg.activation_bits}-bit datapath"
        )
    widest = max(len(seg.columns) for seg in plan.segments)
    if widest > cfg.array_rows:
        raise InfeasibleError(
            f"segment of {widest} columns does not fit {cfg.array_rows} array rows"
        )
    if w.rows > cfg.buffer_depth:
        raise InfeasibleError(
            f"{w.rows} outputs exceed accumulation buffer depth {cfg.buffer_depth}"
        )

    psum_limit = np.int64(1) << (cfg.psum_bits - 1)
    regs = np.zeros(cfg.array_rows, dtype=np.int64)
    buffer = np.zeros((cfg.buffer_depth, acts.vectors), dtype=np.int64)
    in_segment_flips = 0
    boundary_flips = 0
    first_row_of_stream = True
    for seg in plan.segments:
        cols = list(seg.columns)
        lanes = len(cols)
        order = tuple(seg.order)
        codes = w.data[list(order)][:, cols]
        seg_acts = acts.data[cols]
        for j in range(w.rows):
            row = codes[j]
            flips = int(popcount(regs[:lanes] ^ row).sum())
            if j > 0:
                in_segment_flips += flips
            elif not first_row_of_stream:
                boundary_flips += flips
            regs[:lanes] = row
            addr = order[j]
            buffer[addr] += row @ seg_acts
            if np.any(buffer[addr] >= psum_limit):
                raise InfeasibleError(
                    f"partial sum overflows signed {cfg.psum_bits}-bit accumulator "
                    f"at address {addr}"
                )
            first_row_of_stream = False

    ops = w.rows * w.cols * acts.vectors
    energy, mem_energy = estimate_energy(
        ops, params, flips=in_segment_flips + boundary_flips, mode="empirical"
    )
    return StreamReport(
        in_segment_flips=in_segment_flips,
        boundary_flips=boundary_flips,
        outputs=buffer[: w.rows],
        energy=energy,
        mem_energy=mem_energy,
    )
