"""Counting bit flips between consecutively streamed weight rows.

An input-stationary accelerator loads one weight row per beat into the same
rank of registers. Every bit that differs between the outgoing and incoming
row toggles a flip-flop and burns dynamic energy, so the cost of a streaming
schedule is the summed hamming distance (HD) over adjacent rows. This demo
computes that metric by hand, then with the library, and shows why a random
matrix normalizes to about 0.5 flips per register bit.
"""

import numpy as np

from hdopt import WeightMatrix, hd_matrix, hd_scalar, nhd

w = WeightMatrix(
    "toy",
    bits=3,
    data=[
        [0b101, 0b010],
        [0b100, 0b011],
        [0b100, 0b100],
    ],
)

print("3-bit matrix, rows stream top to bottom:")
for row in w.data:
    print("   ", [format(v, "03b") for v in row])

print("\nAdjacent-row flips, column by column:")
total = 0
for j in range(w.rows - 1):
    flips = [hd_scalar(int(a), int(b), w.bits)
             for a, b in zip(w.data[j], w.data[j + 1])]
    total += sum(flips)
    print(f"  row {j} -> {j + 1}: {flips}  (subtotal {sum(flips)})")
print(f"hand count  : {total}")
print(f"hd_matrix   : {hd_matrix(w)}")
assert hd_matrix(w) == total

# Normalized HD divides by every register bit that could have flipped:
# cols * (rows - 1) * bits. It makes matrices of different shapes comparable.
denominator = w.cols * (w.rows - 1) * w.bits
print(f"\nnhd = {hd_matrix(w)} / {denominator} = {nhd(w):.4f}")

# Independent uniform codes flip each bit with probability 1/2, so a big
# random matrix lands close to nhd = 0.5 -- the no-optimization baseline.
rng = np.random.default_rng(0)
big = WeightMatrix("random", 4, rng.integers(0, 16, size=(256, 256)))
print(f"random 256x256 4-bit matrix: nhd = {nhd(big):.4f} (~0.5 baseline)")
