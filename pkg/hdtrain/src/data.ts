/** Synthetic classification task: well-separated gaussian blobs.
 *
 * Deliberately easy -- the point of the harness is the quantization and
 * regularization machinery, not the task. Sized so a full training run
 * finishes in seconds.
 */

import { Rng } from "./rng.js";

export interface Dataset {
  classes: number;
  dim: number;
  trainX: Float64Array; // trainN x dim, row-major
  trainY: Int32Array;
  testX: Float64Array;
  testY: Int32Array;
}

export interface DatasetSpec {
  classes: number;
  dim: number;
  trainPerClass: number;
  testPerClass: number;
  centerScale: number;
  noise: number;
}

export const DEFAULT_DATASET: DatasetSpec = {
  classes: 8,
  dim: 16,
  trainPerClass: 64,
  testPerClass: 64,
  centerScale: 3.0,
  noise: 0.55,
};

export function makeBlobs(seed: number, spec: DatasetSpec = DEFAULT_DATASET): Dataset {
  const rng = new Rng(seed);
  const { classes, dim } = spec;

  const centers = new Float64Array(classes * dim);
  for (let k = 0; k < classes; k++) {
    let norm = 0;
    for (let d = 0; d < dim; d++) {
      const v = rng.gauss();
      centers[k * dim + d] = v;
      norm += v * v;
    }
    norm = Math.sqrt(norm) || 1;
    for (let d = 0; d < dim; d++) {
      centers[k * dim + d] = (centers[k * dim + d] / norm) * spec.centerScale;
    }
  }

  const fill = (perClass: number): [Float64Array, Int32Array] => {
    const n = classes * perClass;
    const x = new Float64Array(n * dim);
    const y = new Int32Array(n);
    for (let i = 0; i < n; i++) {
      const k = i % classes;
      y[i] = k;
      for (let d = 0; d < dim; d++) {
        x[i * dim + d] = centers[k * dim + d] + spec.noise * rng.gauss();
      }
    }
    return [x, y];
  };

  const [trainX, trainY] = fill(spec.trainPerClass);
  const [testX, testY] = fill(spec.testPerClass);
  return { classes, dim, trainX, trainY, testX, testY };
}
