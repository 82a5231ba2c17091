"""Carrying a reorder across layers: re-layout offline or LUT at runtime.

Reordering layer N's output channels scrambles the channel addressing that
layer N+1 expects on its inputs. There are two remedies:

  1. relayout_pair  -- bake the permutation into both weight tensors offline
     (layer N's rows and layer N+1's columns move together). Free at runtime
     but only possible for single-segment plans.
  2. input_permutation_lut -- keep weights as-is and give layer N+1 a small
     read-side address table so it consumes the drain order directly. Works
     for any plan; costs a LUT lookup per read.

Both must leave the composed network function bit-identical. This demo shows
each route end to end, including the LUT silicon cost.
"""

import math

import numpy as np

from hdopt import (
    ActivationSet,
    ArrayConfig,
    ChannelOrder,
    ClusterPlan,
    Segment,
    WeightMatrix,
    cluster_then_reorder,
    drain_through_lut,
    emit_lut,
    exact_reorder,
    hd_matrix,
    hd_plan,
    input_permutation_lut,
    positional_plan,
    relayout_pair,
    simulate_stream,
)

rng = np.random.default_rng(42)
w1 = WeightMatrix("layer1", 4, rng.integers(0, 16, size=(6, 4)))
w2 = WeightMatrix("layer2", 4, rng.integers(0, 16, size=(5, 6)))
x = ActivationSet(4, rng.integers(0, 16, size=(4, 3)))
reference = w2.data @ (w1.data @ x.data)

# --- Route 1: offline re-layout (single-segment plan) ----------------------
order = exact_reorder(w1)
plan1 = ClusterPlan((Segment(tuple(range(w1.cols)), order),), w1.cols)
w1r, w2r = relayout_pair(w1, plan1, w2)
print(f"layer1 hd: {hd_matrix(w1)} -> {hd_matrix(w1r)} after baking order {tuple(order)}")
assert np.array_equal(w2r.data @ (w1r.data @ x.data), reference)
print("re-layout route: composed outputs bit-identical.")

# --- Route 2: runtime LUT (any plan, here a 2-segment clustering) ----------
plan2, _ = cluster_then_reorder(
    w2, t=2, width=math.ceil(w2.cols / 2), iters=10, seed=0, restarts=5,
    reorder_mode="exact",
)
print(f"\nlayer2 clustered into {[seg.columns for seg in plan2.segments]}, "
      f"hd {hd_matrix(w2)} -> {hd_plan(w2, plan2).total_hd}")

cfg = ArrayConfig(array_rows=8, activation_bits=16)
out1 = simulate_stream(w1, plan1, x, cfg).outputs  # original output addresses

lut = input_permutation_lut(plan2)
print(f"read-side LUT: depth {lut.depth}, {lut.entry_bits} bits/entry, "
      f"{lut.table_size_bits} bits total "
      f"({lut.table_size_bits / 8 / 1024:.2f} KiB)")

drained = drain_through_lut(out1, lut)            # values in plan2 column order
w2_pos = WeightMatrix("layer2pos", w2.bits, w2.data[:, list(lut.tables[0])])
out2 = simulate_stream(w2_pos, positional_plan(plan2), ActivationSet(16, drained), cfg).outputs
assert np.array_equal(out2, reference)
print("LUT route: composed outputs bit-identical.")

# The write-side companion table scatters each segment's rows back to their
# true accumulator addresses while layer 2 itself streams reordered.
write_lut = emit_lut(plan2, depth=16)
print(f"\nwrite-side address tables (one per segment): "
      f"{[list(t) for t in write_lut.tables]}")
