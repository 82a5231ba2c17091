/** Bit-plane arithmetic on quantized codes, in a form that admits
 * straight-through gradients.
 *
 * The b-th bit of a code x can be written without shifts as
 *
 *     bit_b(x) = (1 / 2^b) * (x - 2^(b+1) * floor(x / 2^(b+1)))
 *                 ... then floored once more to strip bits below b:
 *     bit_b(x) = floor((x mod 2^(b+1)) / 2^b)
 *
 * The closed form matters because training treats each floor as a
 * straight-through function (gradient 1), which yields an analytic
 * gradient coefficient per bit plane -- see steCoeff* below.
 */

/** Extract bit `b` of code `x` under bit width `bits`. Equals (x >> b) & 1. */
export function bitExtract(x: number, b: number, bits: number): 0 | 1 {
  if (!Number.isInteger(bits) || bits < 1) {
    throw new RangeError(`bits must be a positive integer, got ${bits}`);
  }
  if (!Number.isInteger(b) || b < 0 || b >= bits) {
    throw new RangeError(`bit index ${b} out of range [0, ${bits})`);
  }
  if (!Number.isInteger(x) || x < 0 || x >= 2 ** bits) {
    throw new RangeError(`code ${x} out of range [0, ${2 ** bits})`);
  }
  const wrap = 2 ** (b + 1);
  const residue = x - wrap * Math.floor(x / wrap); // x mod 2^(b+1)
  return Math.floor(residue / 2 ** b) as 0 | 1;
}

/**
 * Straight-through gradient of bit_b(x) w.r.t. x when BOTH floors in the
 * closed form pass gradient 1:
 *
 *   d bit_b / d x = (1/2^b) * (1 - 2^(b+1) * (1/2^(b+1))) = 0
 *
 * Identically zero: the wrap term cancels the direct term, so naive
 * straight-through cannot train any bit whose wrap is active. This is
 * why bits are regularized highest-first: once every bit above b is
 * frozen, codes move only inside a 2^(b+1)-sized block, the wrap term
 * is constant there, and the surviving gradient is steCoeffActiveBit.
 */
export function steCoeffFullFormula(b: number, bits: number): number {
  if (!Number.isInteger(b) || b < 0 || b >= bits) {
    throw new RangeError(`bit index ${b} out of range [0, ${bits})`);
  }
  const floorGrad = 1; // straight-through: both floors pass gradient 1
  return (1 / 2 ** b) * (1 - 2 ** (b + 1) * floorGrad * (1 / 2 ** (b + 1)));
}

/**
 * Straight-through gradient of bit_b w.r.t. the code when bit b is the
 * highest UNFROZEN bit: inside a frozen block the wrap is constant, so
 * bit_b(x) = floor((x - blockLo) / 2^b) and the coefficient is 1/2^b.
 */
export function steCoeffActiveBit(b: number): number {
  if (!Number.isInteger(b) || b < 0) {
    throw new RangeError(`bit index must be >= 0, got ${b}`);
  }
  return 1 / 2 ** b;
}
