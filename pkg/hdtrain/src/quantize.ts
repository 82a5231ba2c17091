/** Uniform B-bit quantizer with latent continuous weights, plus the
 * block-projection machinery that keeps already-frozen bit planes fixed.
 *
 * The scale is FIXED (not learned) so that the latent interval mapping to
 * each code never moves: freezing a bit then reduces to clamping the latent
 * weight into a contiguous code block, which survives any later optimizer
 * step followed by re-projection.
 */

export class Quantizer {
  readonly bits: number;
  readonly levels: number;
  readonly offset: number; // code of latent 0 (mid-scale)
  readonly delta: number; // latent distance between adjacent codes

  constructor(bits: number, delta = 1 / 2 ** (bits - 1)) {
    if (!Number.isInteger(bits) || bits < 1) {
      throw new RangeError(`bits must be a positive integer, got ${bits}`);
    }
    if (!(delta > 0)) {
      throw new RangeError(`delta must be positive, got ${delta}`);
    }
    this.bits = bits;
    this.levels = 2 ** bits;
    this.offset = 2 ** (bits - 1);
    this.delta = delta;
  }

  /** Latent weight -> integer code in [0, 2^bits). */
  quantize(w: number): number {
    const code = Math.round(w / this.delta) + this.offset;
    return Math.min(this.levels - 1, Math.max(0, code));
  }

  /** Integer code -> dequantized weight used in the forward pass. */
  dequantize(code: number): number {
    return (code - this.offset) * this.delta;
  }

  quantizeAll(latent: Float64Array, out: Int32Array): void {
    for (let i = 0; i < latent.length; i++) out[i] = this.quantize(latent[i]);
  }
}

/**
 * Per-element code blocks implied by the frozen bit planes. While bits
 * bits-1 .. b+1 are frozen, element i may only take codes in
 * [blockLo[i], blockLo[i] + blockSize), where blockSize = 2^(b+1).
 */
export class FreezeState {
  readonly size: number;
  blockSize: number;
  readonly blockLo: Int32Array;

  constructor(size: number, bits: number) {
    this.size = size;
    this.blockSize = 2 ** bits; // nothing frozen yet: the whole code range
    this.blockLo = new Int32Array(size); // all zeros
  }

  /** Lowest frozen bit index (== bits when nothing is frozen yet). */
  frozenFrom(): number {
    return Math.log2(this.blockSize);
  }

  /** Freeze bit `b`: shrink every element's block around its current code. */
  freezeBit(b: number, codes: Int32Array): void {
    const newSize = 2 ** b;
    if (newSize >= this.blockSize) {
      throw new RangeError(
        `bit ${b} is already frozen (block size ${this.blockSize})`
      );
    }
    for (let i = 0; i < this.size; i++) {
      this.blockLo[i] = Math.floor(codes[i] / newSize) * newSize;
    }
    this.blockSize = newSize;
  }

  /**
   * Clamp latent weights so their codes stay inside their blocks. Call after
   * every optimizer step. The clamp targets the open latent interval that
   * rounds into [blockLo, blockLo + blockSize - 1].
   */
  project(latent: Float64Array, q: Quantizer): void {
    const eps = q.delta * 1e-9;
    for (let i = 0; i < latent.length; i++) {
      const loCode = this.blockLo[i];
      const hiCode = loCode + this.blockSize - 1;
      const lo = (loCode - q.offset - 0.5) * q.delta + eps;
      const hi = (hiCode - q.offset + 0.5) * q.delta - eps;
      if (latent[i] < lo) latent[i] = lo;
      else if (latent[i] > hi) latent[i] = hi;
    }
  }

  /** True iff every code sits inside its element's block. */
  respects(codes: Int32Array): boolean {
    for (let i = 0; i < this.size; i++) {
      const lo = this.blockLo[i];
      if (codes[i] < lo || codes[i] >= lo + this.blockSize) return false;
    }
    return true;
  }
}
