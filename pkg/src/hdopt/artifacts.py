"""Deployment artifacts: accumulator address tables and layer-pair re-layout.

An AddressLut translates the streaming position counter into a physical
accumulator address, so reordered or clustered streams still land partial
sums at their original channel addresses (write side), or drain a finished
buffer in exactly the channel order the next layer's plan wants to consume
(read side).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ClusterPlan,
    InfeasibleError,
    Segment,
    ValidationError,
    WeightMatrix,
    _read_json,
    _require,
)

DEFAULT_BUFFER_DEPTH = 1024


@dataclass(frozen=True)
class AddressLut:
    """Per-segment translation tables: position counter j -> buffer address."""

    depth: int
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.depth < 1:
            raise ValidationError(f"buffer depth must be >= 1, got {self.depth}")
        if not self.tables:
            raise ValidationError("at least one table required")
        tables = tuple(tuple(int(v) for v in t) for t in self.tables)
        for i, table in enumerate(tables):
            n = len(table)
            if n > self.depth:
                raise InfeasibleError(
                    f"table {i} has {n} entries, exceeding buffer depth {self.depth}"
                )
            if sorted(table) != list(range(n)):
                raise ValidationError(f"table {i} is not a permutation of 0..{n - 1}")
        object.__setattr__(self, "tables", tables)

    @property
    def entry_bits(self) -> int:
        """Physical width of one entry: enough bits to address the buffer."""
        return max(1, math.ceil(math.log2(self.depth)))

    @property
    def table_size_bits(self) -> int:
        """Storage for one full-depth table."""
        return self.depth * self.entry_bits


def emit_lut(plan: ClusterPlan, depth: int = DEFAULT_BUFFER_DEPTH) -> AddressLut:
    """Write-side tables: while streaming segment i, the partial sum produced
    at position j accumulates into address plan.segments[i].order[j]."""
    if plan.k > depth:
        raise InfeasibleError(f"{plan.k} outputs exceed buffer depth {depth}")
    return AddressLut(depth, tuple(tuple(seg.order) for seg in plan.segments))


def input_permutation_lut(plan: ClusterPlan, depth: int = DEFAULT_BUFFER_DEPTH) -> AddressLut:
    """Read-side table for the PREVIOUS layer's buffer: draining through it
    emits channels in the concatenated segment-column order `plan` consumes."""
    drain = tuple(c for seg in plan.segments for c in seg.columns)
    if len(drain) > depth:
        raise InfeasibleError(f"{len(drain)} channels exceed buffer depth {depth}")
    return AddressLut(depth, (drain,))


def drain_through_lut(values: np.ndarray, lut: AddressLut) -> np.ndarray:
    """Read buffer rows in table order: result[j] = values[table[j]]."""
    if len(lut.tables) != 1:
        raise ValidationError("draining needs a single-table LUT")
    table = list(lut.tables[0])
    if len(table) != np.asarray(values).shape[0]:
        raise ValidationError(
            f"table covers {len(table)} addresses, buffer holds {np.asarray(values).shape[0]}"
        )
    return np.asarray(values)[table]


def positional_plan(plan: ClusterPlan) -> ClusterPlan:
    """Re-express segments over drain positions 0..C-1 instead of original
    channel ids, for running on data already permuted by input_permutation_lut."""
    segments = []
    offset = 0
    for seg in plan.segments:
        n = len(seg.columns)
        segments.append(Segment(tuple(range(offset, offset + n)), seg.order))
        offset += n
    return ClusterPlan(tuple(segments), plan.width)


def relayout_pair(
    w1: WeightMatrix, plan1: ClusterPlan, w2: WeightMatrix
) -> tuple[WeightMatrix, WeightMatrix]:
    """Bake a single-segment order into storage: permute w1's rows and w2's
    columns identically, preserving w2'.(w1'.x) == w2.(w1.x) for every x."""
    plan1.validate_for(w1)
    if len(plan1.segments) != 1:
        raise ValidationError(
            "re-layout needs a single-segment plan; multi-segment plans keep the LUT"
        )
    if w2.cols != w1.rows:
        raise ValidationError(
            f"second matrix has {w2.cols} columns, first produces {w1.rows} channels"
        )
    order = list(plan1.segments[0].order)
    w1p = WeightMatrix(name=w1.name, bits=w1.bits, data=w1.data[order])
    w2p = WeightMatrix(name=w2.name, bits=w2.bits, data=w2.data[:, order])
    return w1p, w2p


def save_lut(lut: AddressLut, path) -> None:
    obj = {"depth": lut.depth, "tables": [list(t) for t in lut.tables]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_lut(path) -> AddressLut:
    obj = _read_json(path)
    depth = int(_require(obj, "depth", path))
    tables = _require(obj, "tables", path)
    if not isinstance(tables, list):
        raise ValidationError(f"{path}: tables must be a list of lists")
    return AddressLut(depth, tuple(tuple(int(v) for v in t) for t in tables))
