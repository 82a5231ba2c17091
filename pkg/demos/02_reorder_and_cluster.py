"""Cutting bit flips by reordering rows and clustering columns.

Output channels of a layer can be streamed in any order (the accumulator
address LUT hides the shuffle), so picking a smart row order is a pure win.
When the array is narrower than the layer, columns are streamed in segments;
choosing WHICH columns share a segment matters too. This demo walks both
levers on the bundled fixture matrices.
"""

from pathlib import Path

from hdopt import (
    cluster_then_reorder,
    exact_reorder,
    greedy_reorder,
    hd_matrix,
    hd_plan,
    hd_with_order,
    load_weight_bundle,
    segment_then_reorder,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# --- Lever 1: reorder the rows of one full-width stream -------------------
w = load_weight_bundle(FIXTURES / "w_a.json")
print(f"{w.name}: identity-order hd = {hd_matrix(w)}")

greedy = greedy_reorder(w)
print(f"greedy nearest-neighbour order {tuple(greedy)}: hd = {hd_with_order(w, greedy)}")

exact = exact_reorder(w)  # Held-Karp dynamic program, rows <= 12
print(f"exact optimal order           {tuple(exact)}: hd = {hd_with_order(w, exact)}")
assert hd_with_order(w, exact) == 8 and hd_matrix(w) == 24

# --- Lever 2: choose column segments, then reorder inside each ------------
w = load_weight_bundle(FIXTURES / "w_c.json")
print(f"\n{w.name}: {w.rows}x{w.cols}, array width 4, identity hd = {hd_matrix(w)}")

contiguous = segment_then_reorder(w, width=4, reorder_mode="exact")
print(f"contiguous halves {[seg.columns for seg in contiguous.segments]}"
      f" -> hd = {hd_plan(w, contiguous).total_hd}")

plan, trace = cluster_then_reorder(
    w, t=2, width=4, iters=20, seed=0, restarts=20, reorder_mode="exact"
)
print(f"clustered halves  {[seg.columns for seg in plan.segments]}"
      f" -> hd = {hd_plan(w, plan).total_hd}")
print(f"objective per accepted iteration: {trace.objectives}")
print(f"winning restart: {trace.best_restart}"
      " (-1 would mean the contiguous split was never beaten)")

assert hd_plan(w, contiguous).total_hd == 22
assert hd_plan(w, plan).total_hd == 16
assert all(a >= b for a, b in zip(trace.objectives, trace.objectives[1:]))
print("\nGrouping correlated columns into the same segment saved "
      f"{hd_plan(w, contiguous).total_hd - hd_plan(w, plan).total_hd} more flips "
      "than contiguous chunking.")
