import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { bitExtract } from "../src/bits.js";
import { hdLossBackward, hdLossForward } from "../src/hdloss.js";
import {
  analyzeHd,
  clusterPlan,
  identityPlan,
  saveWeightBundle,
} from "../src/plan.js";
import { Rng } from "../src/rng.js";

// 2-bit matrix whose rows alternate between all-zeros and all-threes: every
// bit plane flips in every column on every transition.
const ALTERNATING = new Int32Array([
  0, 0, 0, 0,
  3, 3, 3, 3,
  0, 0, 0, 0,
  3, 3, 3, 3,
]);

describe("hdLossForward", () => {
  it("counts 12 flips on the alternating matrix at bit 1 (3 transitions x 4 cols)", () => {
    const plan = identityPlan(4, 4);
    expect(hdLossForward(ALTERNATING, 4, 4, plan, 1, 2)).toBe(12);
    expect(hdLossForward(ALTERNATING, 4, 4, plan, 0, 2)).toBe(12);
  });

  it("is zero for constant weights", () => {
    const codes = new Int32Array(12).fill(5);
    const plan = identityPlan(4, 3);
    for (let b = 0; b < 4; b++) {
      expect(hdLossForward(codes, 4, 3, plan, b, 4)).toBe(0);
    }
  });

  it("rejects regularizing a frozen bit", () => {
    const plan = identityPlan(4, 4);
    // bits 3..2 frozen -> only bits 1 and 0 are trainable
    expect(() => hdLossForward(ALTERNATING, 4, 4, plan, 2, 4, 2)).toThrow(
      /frozen/
    );
    expect(hdLossForward(ALTERNATING, 4, 4, plan, 1, 4, 2)).toBe(12);
  });

  it("rejects shape mismatches and bad bit indices", () => {
    const plan = identityPlan(4, 4);
    expect(() => hdLossForward(ALTERNATING, 4, 5, plan, 0, 2)).toThrow(
      RangeError
    );
    expect(() => hdLossForward(ALTERNATING, 4, 4, plan, 2, 2)).toThrow(
      RangeError
    );
    const shortOrder = { width: 4, segments: [{ columns: [0, 1, 2, 3], order: [0, 1] }] };
    expect(() => hdLossForward(ALTERNATING, 4, 4, shortOrder, 0, 2)).toThrow(
      RangeError
    );
  });

  it("agrees exactly with the optimizer CLI on bit-sliced matrices", () => {
    const dir = mkdtempSync(join(tmpdir(), "hdloss-"));
    const rng = new Rng(123);
    const rows = 8;
    const cols = 6;
    const bits = 4;
    const codes = new Int32Array(rows * cols);
    for (let i = 0; i < codes.length; i++) codes[i] = rng.int(16);

    const wPath = join(dir, "w.json");
    saveWeightBundle(wPath, "rand", bits, rows, cols, codes);
    const plan = clusterPlan(wPath, join(dir, "plan.json"), 2, 3, 0);

    let planeSum = 0;
    for (let b = 0; b < bits; b++) {
      const slice = new Int32Array(rows * cols);
      for (let i = 0; i < codes.length; i++) {
        slice[i] = bitExtract(codes[i], b, bits);
      }
      const slicePath = join(dir, `slice_${b}.json`);
      saveWeightBundle(slicePath, `bit${b}`, 1, rows, cols, slice);
      const cliHd = analyzeHd(slicePath, join(dir, "plan.json")).hd;
      const localHd = hdLossForward(codes, rows, cols, plan, b, bits);
      expect(localHd).toBe(cliHd);
      planeSum += localHd;
    }
    // Bit planes partition the flip count: the slices sum to the full HD.
    expect(planeSum).toBe(analyzeHd(wPath, join(dir, "plan.json")).hd);
  });
});

describe("hdLossBackward", () => {
  it("leaves the gradient untouched for constant weights", () => {
    const codes = new Int32Array(8).fill(9);
    const grad = new Float64Array(8);
    hdLossBackward(codes, 4, 2, identityPlan(4, 2), 2, 4, 0.125, 1.0, grad);
    expect(Array.from(grad)).toEqual([0, 0, 0, 0, 0, 0, 0, 0]);
  });

  it("pulls mismatched pairs together with magnitude scale/(2^b * delta)", () => {
    // One column, two rows: bit 2 of 4 (=100b) is 1, of 0 is 0.
    const codes = new Int32Array([4, 0]);
    const grad = new Float64Array(2);
    const delta = 0.125;
    const lambda = 0.5;
    hdLossBackward(codes, 2, 1, identityPlan(2, 1), 2, 3, delta, lambda, grad);
    const mag = lambda * (1 / 2 ** 2) / delta;
    // prev has the high bit: push it down; next lacks it: push it up.
    expect(grad[0]).toBeCloseTo(mag, 12);
    expect(grad[1]).toBeCloseTo(-mag, 12);
  });

  it("accumulates over plan adjacency and respects segment columns", () => {
    // Two columns in separate segments; only column 0's segment pairs rows
    // (0,1); column 1's segment pairs rows (1,0) -- same pair, reversed.
    const codes = new Int32Array([
      1, 0,
      0, 1,
    ]);
    const plan = {
      width: 1,
      segments: [
        { columns: [0], order: [0, 1] },
        { columns: [1], order: [1, 0] },
      ],
    };
    const grad = new Float64Array(4);
    hdLossBackward(codes, 2, 2, plan, 0, 1, 0.25, 1.0, grad, 1);
    const mag = 1.0 / 0.25; // 1/(2^0 * delta)
    expect(grad[0]).toBeCloseTo(mag, 12); // row0 col0: bit 1 -> push down
    expect(grad[2]).toBeCloseTo(-mag, 12); // row1 col0: bit 0 -> push up
    expect(grad[3]).toBeCloseTo(mag, 12); // row1 col1 is prev in its segment
    expect(grad[1]).toBeCloseTo(-mag, 12);
  });

  it("rejects a gradient buffer of the wrong size", () => {
    const codes = new Int32Array([0, 1]);
    expect(() =>
      hdLossBackward(codes, 2, 1, identityPlan(2, 1), 0, 1, 0.1, 1, new Float64Array(3))
    ).toThrow(RangeError);
  });
});
