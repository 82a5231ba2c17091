/** Differentiable surrogate for the streaming bit-flip count of one bit
 * plane under a plan.
 *
 * Forward: sum over plan segments, each segment's consecutive ordered row
 * pairs, and the segment's columns of |bit_b(prev) - bit_b(next)|. Since
 * bits are {0, 1}, the absolute difference equals XOR, so the forward value
 * is exactly the integer flip count of the bit-b slice.
 *
 * Backward: straight-through. With every bit above b frozen, bit b is the
 * top of each code block, so d bit_b / d code = 1/2^b (see bits.ts) and
 * d code / d latent = 1/delta through the rounding quantizer. Each mismatch
 * therefore pulls the pair's latent weights together with magnitude
 * 1 / (2^b * delta), signed to reduce the mismatch.
 */

import { bitExtract, steCoeffActiveBit } from "./bits.js";
import type { Plan } from "./plan.js";

function checkArgs(
  codes: Int32Array,
  rows: number,
  cols: number,
  plan: Plan,
  b: number,
  bits: number,
  frozenFrom: number
): void {
  if (codes.length !== rows * cols) {
    throw new RangeError(
      `codes length ${codes.length} != rows*cols = ${rows * cols}`
    );
  }
  if (b < 0 || b >= bits) {
    throw new RangeError(`bit index ${b} out of range [0, ${bits})`);
  }
  if (b >= frozenFrom) {
    throw new RangeError(
      `bit ${b} is frozen (frozen from bit ${frozenFrom} down); ` +
        `only unfrozen bits may be regularized`
    );
  }
  for (const seg of plan.segments) {
    if (seg.order.length !== rows) {
      throw new RangeError(
        `plan order length ${seg.order.length} != rows ${rows}`
      );
    }
  }
}

/** Integer flip count of bit plane `b` under the plan's segment orders. */
export function hdLossForward(
  codes: Int32Array,
  rows: number,
  cols: number,
  plan: Plan,
  b: number,
  bits: number,
  frozenFrom: number = bits
): number {
  checkArgs(codes, rows, cols, plan, b, bits, frozenFrom);
  let total = 0;
  for (const seg of plan.segments) {
    for (let j = 0; j + 1 < seg.order.length; j++) {
      const prev = seg.order[j] * cols;
      const next = seg.order[j + 1] * cols;
      for (const col of seg.columns) {
        total += Math.abs(
          bitExtract(codes[prev + col], b, bits) -
            bitExtract(codes[next + col], b, bits)
        );
      }
    }
  }
  return total;
}

/**
 * Gradient of hdLossForward w.r.t. the LATENT weights, accumulated into
 * `grad` (same row-major layout as codes), scaled by `scale` (the caller
 * passes lambda). `delta` is the quantizer step.
 */
export function hdLossBackward(
  codes: Int32Array,
  rows: number,
  cols: number,
  plan: Plan,
  b: number,
  bits: number,
  delta: number,
  scale: number,
  grad: Float64Array,
  frozenFrom: number = bits
): void {
  checkArgs(codes, rows, cols, plan, b, bits, frozenFrom);
  if (grad.length !== codes.length) {
    throw new RangeError(`grad length ${grad.length} != ${codes.length}`);
  }
  const coeff = (scale * steCoeffActiveBit(b)) / delta;
  if (coeff === 0) return;
  for (const seg of plan.segments) {
    for (let j = 0; j + 1 < seg.order.length; j++) {
      const prev = seg.order[j] * cols;
      const next = seg.order[j + 1] * cols;
      for (const col of seg.columns) {
        const sign =
          bitExtract(codes[prev + col], b, bits) -
          bitExtract(codes[next + col], b, bits);
        if (sign !== 0) {
          // d|bp - bn|/d bp = sign, d|bp - bn|/d bn = -sign
          grad[prev + col] += sign * coeff;
          grad[next + col] -= sign * coeff;
        }
      }
    }
  }
}
