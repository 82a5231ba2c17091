/** Two-layer classifier with a quantized hidden layer, trained by manual
 * backprop. The hidden weight matrix is the one whose streaming flip cost
 * gets regularized: K hidden units = K output channels (rows), C input
 * features = C columns.
 *
 * Forward uses the DEQUANTIZED weights (quantization-aware training);
 * gradients flow to the latent weights straight-through (d wq / d w = 1,
 * since code = round(w/delta) passes gradient 1/delta and wq = code*delta).
 */

import { Quantizer } from "./quantize.js";
import { Rng } from "./rng.js";

export class Model {
  readonly dim: number; // C: input features
  readonly hidden: number; // K: quantized rows
  readonly classes: number;
  readonly q: Quantizer;

  readonly latentW: Float64Array; // hidden x dim, row-major (latent, continuous)
  readonly b1: Float64Array; // hidden
  readonly v: Float64Array; // classes x hidden (kept full precision)
  readonly b2: Float64Array; // classes

  readonly gradW: Float64Array;
  readonly gradB1: Float64Array;
  readonly gradV: Float64Array;
  readonly gradB2: Float64Array;

  constructor(dim: number, hidden: number, classes: number, q: Quantizer, rng: Rng) {
    this.dim = dim;
    this.hidden = hidden;
    this.classes = classes;
    this.q = q;
    this.latentW = new Float64Array(hidden * dim);
    this.b1 = new Float64Array(hidden);
    this.v = new Float64Array(classes * hidden);
    this.b2 = new Float64Array(classes);
    const wStd = Math.sqrt(2 / dim);
    for (let i = 0; i < this.latentW.length; i++) this.latentW[i] = wStd * rng.gauss();
    const vStd = Math.sqrt(2 / hidden);
    for (let i = 0; i < this.v.length; i++) this.v[i] = vStd * rng.gauss();
    this.gradW = new Float64Array(hidden * dim);
    this.gradB1 = new Float64Array(hidden);
    this.gradV = new Float64Array(classes * hidden);
    this.gradB2 = new Float64Array(classes);
  }

  /** Quantize the current latent hidden weights into `out`. */
  codes(out: Int32Array): void {
    this.q.quantizeAll(this.latentW, out);
  }

  /**
   * Cross-entropy loss and gradients over one minibatch; gradients are
   * written (not accumulated) into the grad* buffers. Returns mean CE.
   */
  lossAndGrad(
    x: Float64Array,
    y: Int32Array,
    batch: Int32Array,
    codes: Int32Array
  ): number {
    const { dim, hidden, classes } = this;
    const n = batch.length;
    this.gradW.fill(0);
    this.gradB1.fill(0);
    this.gradV.fill(0);
    this.gradB2.fill(0);

    const wq = new Float64Array(hidden * dim);
    for (let i = 0; i < wq.length; i++) wq[i] = this.q.dequantize(codes[i]);

    const h = new Float64Array(hidden);
    const logits = new Float64Array(classes);
    const probs = new Float64Array(classes);
    let ceSum = 0;

    for (let s = 0; s < n; s++) {
      const row = batch[s] * dim;
      // hidden pre-activation + relu
      for (let k = 0; k < hidden; k++) {
        let acc = this.b1[k];
        const base = k * dim;
        for (let d = 0; d < dim; d++) acc += wq[base + d] * x[row + d];
        h[k] = acc > 0 ? acc : 0;
      }
      // logits + softmax
      let maxLogit = -Infinity;
      for (let c = 0; c < classes; c++) {
        let acc = this.b2[c];
        const base = c * hidden;
        for (let k = 0; k < hidden; k++) acc += this.v[base + k] * h[k];
        logits[c] = acc;
        if (acc > maxLogit) maxLogit = acc;
      }
      let z = 0;
      for (let c = 0; c < classes; c++) {
        probs[c] = Math.exp(logits[c] - maxLogit);
        z += probs[c];
      }
      for (let c = 0; c < classes; c++) probs[c] /= z;
      ceSum += -Math.log(Math.max(probs[y[batch[s]]], 1e-12));

      // backward: dlogits -> (v, b2, h) -> relu -> (w, b1)
      for (let c = 0; c < classes; c++) {
        const dlogit = (probs[c] - (c === y[batch[s]] ? 1 : 0)) / n;
        this.gradB2[c] += dlogit;
        const base = c * hidden;
        for (let k = 0; k < hidden; k++) this.gradV[base + k] += dlogit * h[k];
      }
      for (let k = 0; k < hidden; k++) {
        if (h[k] <= 0) continue; // relu gate (also kills dh accumulation)
        let dh = 0;
        for (let c = 0; c < classes; c++) {
          dh += ((probs[c] - (c === y[batch[s]] ? 1 : 0)) / n) * this.v[c * hidden + k];
        }
        this.gradB1[k] += dh;
        const base = k * dim;
        for (let d = 0; d < dim; d++) this.gradW[base + d] += dh * x[row + d];
      }
    }
    return ceSum / n;
  }

  /** SGD update from the grad* buffers (latent W moves straight-through). */
  step(lr: number): void {
    for (let i = 0; i < this.latentW.length; i++) this.latentW[i] -= lr * this.gradW[i];
    for (let i = 0; i < this.b1.length; i++) this.b1[i] -= lr * this.gradB1[i];
    for (let i = 0; i < this.v.length; i++) this.v[i] -= lr * this.gradV[i];
    for (let i = 0; i < this.b2.length; i++) this.b2[i] -= lr * this.gradB2[i];
  }

  /** Top-1 accuracy with the current quantized weights. */
  accuracy(x: Float64Array, y: Int32Array): number {
    const { dim, hidden, classes } = this;
    const codes = new Int32Array(hidden * dim);
    this.codes(codes);
    const wq = new Float64Array(hidden * dim);
    for (let i = 0; i < wq.length; i++) wq[i] = this.q.dequantize(codes[i]);

    const n = y.length;
    let correct = 0;
    const h = new Float64Array(hidden);
    for (let s = 0; s < n; s++) {
      const row = s * dim;
      for (let k = 0; k < hidden; k++) {
        let acc = this.b1[k];
        const base = k * dim;
        for (let d = 0; d < dim; d++) acc += wq[base + d] * x[row + d];
        h[k] = acc > 0 ? acc : 0;
      }
      let best = 0;
      let bestVal = -Infinity;
      for (let c = 0; c < classes; c++) {
        let acc = this.b2[c];
        const base = c * hidden;
        for (let k = 0; k < hidden; k++) acc += this.v[base + k] * h[k];
        if (acc > bestVal) {
          bestVal = acc;
          best = c;
        }
      }
      if (best === y[s]) correct++;
    }
    return correct / n;
  }
}
