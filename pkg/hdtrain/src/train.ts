/** Freeze-and-regularize training loop.
 *
 * Bits are handled highest-first. For each bit b (MSB down to 0):
 *   - train epochsPerBit epochs with loss = CE + lambda * flipLoss(bit b),
 *     where the flip loss follows the current streaming plan's adjacency;
 *   - then freeze bit b: every weight's code is confined to the block that
 *     keeps bits >= b fixed, enforced by projection after every step.
 * Every reclusterEvery epochs the current quantized weights are exported
 * and the `hdopt cluster` CLI refreshes the plan, so the regularizer always
 * chases the adjacency that will actually be streamed.
 */

import { mkdirSync, writeFileSync, copyFileSync } from "node:fs";
import { join } from "node:path";

import { DEFAULT_DATASET, DatasetSpec, makeBlobs } from "./data.js";
import { hdLossBackward, hdLossForward } from "./hdloss.js";
import { Model } from "./model.js";
import { analyzeHd, clusterPlan, Plan, saveWeightBundle } from "./plan.js";
import { FreezeState, Quantizer } from "./quantize.js";
import { Rng } from "./rng.js";

export interface TrainConfig {
  lambda: number;
  bits: number;
  epochsPerBit: number;
  reclusterEvery: number;
  seed: number;
  out: string;
  lr?: number;
  batchSize?: number;
  hidden?: number;
  clusters?: number;
  width?: number;
  dataset?: DatasetSpec;
  /** Re-check after every optimizer step that frozen bits never moved. */
  assertFrozen?: boolean;
}

export interface MetricsRow {
  epoch: number;
  loss: number;
  accuracy: number;
  hd: number;
  nhd: number;
}

export interface TrainResult {
  metrics: MetricsRow[];
  finalAccuracy: number;
  finalHd: number;
  finalNhd: number;
  outDir: string;
}

function validate(cfg: TrainConfig): void {
  if (!(cfg.lambda >= 0)) {
    throw new RangeError(`lambda must be >= 0, got ${cfg.lambda}`);
  }
  if (!Number.isInteger(cfg.bits) || cfg.bits < 1) {
    throw new RangeError(`bits must be a positive integer, got ${cfg.bits}`);
  }
  if (!Number.isInteger(cfg.epochsPerBit) || cfg.epochsPerBit < 1) {
    throw new RangeError(
      `epochsPerBit must be >= 1, got ${cfg.epochsPerBit}`
    );
  }
  if (!Number.isInteger(cfg.reclusterEvery) || cfg.reclusterEvery < 1) {
    throw new RangeError(
      `reclusterEvery must be >= 1, got ${cfg.reclusterEvery}`
    );
  }
}

export function freezeAndRegularizeTrain(cfg: TrainConfig): TrainResult {
  validate(cfg);
  const lr = cfg.lr ?? 0.08;
  const batchSize = cfg.batchSize ?? 32;
  const hidden = cfg.hidden ?? 32;
  const spec = cfg.dataset ?? DEFAULT_DATASET;
  const clusters = cfg.clusters ?? 2;
  const width = cfg.width ?? Math.ceil(spec.dim / (cfg.clusters ?? 2));
  const assertFrozen = cfg.assertFrozen ?? true;

  const workDir = join(cfg.out, "work");
  mkdirSync(workDir, { recursive: true });
  const wPath = join(workDir, "w_current.json");
  const planPath = join(workDir, "plan_current.json");

  const data = makeBlobs(cfg.seed, spec);
  const q = new Quantizer(cfg.bits);
  const rng = new Rng(cfg.seed * 7919 + 1);
  const model = new Model(data.dim, hidden, data.classes, q, rng);
  const freeze = new FreezeState(hidden * data.dim, cfg.bits);

  const codes = new Int32Array(hidden * data.dim);
  const exportWeights = (): void => {
    model.codes(codes);
    saveWeightBundle(wPath, "hidden", cfg.bits, hidden, data.dim, codes);
  };

  exportWeights();
  let plan: Plan = clusterPlan(wPath, planPath, clusters, width, cfg.seed);

  const trainN = data.trainY.length;
  const indices = new Int32Array(trainN);
  for (let i = 0; i < trainN; i++) indices[i] = i;

  const metrics: MetricsRow[] = [];
  const totalEpochs = cfg.bits * cfg.epochsPerBit;

  for (let epoch = 1; epoch <= totalEpochs; epoch++) {
    const activeBit = cfg.bits - 1 - Math.floor((epoch - 1) / cfg.epochsPerBit);
    rng.shuffle(indices);
    let lossSum = 0;
    let steps = 0;

    for (let start = 0; start < trainN; start += batchSize) {
      const batch = indices.subarray(start, Math.min(start + batchSize, trainN));
      model.codes(codes);
      const ce = model.lossAndGrad(data.trainX, data.trainY, batch, codes);
      let reg = 0;
      if (cfg.lambda > 0) {
        reg = cfg.lambda * hdLossForward(
          codes, hidden, data.dim, plan, activeBit, cfg.bits, freeze.frozenFrom()
        );
        hdLossBackward(
          codes, hidden, data.dim, plan, activeBit, cfg.bits, q.delta,
          cfg.lambda, model.gradW, freeze.frozenFrom()
        );
      }
      model.step(lr);
      freeze.project(model.latentW, q);
      if (assertFrozen) {
        model.codes(codes);
        if (!freeze.respects(codes)) {
          throw new Error(
            `frozen bits moved at epoch ${epoch} (active bit ${activeBit})`
          );
        }
      }
      lossSum += ce + reg;
      steps++;
    }

    const loss = lossSum / steps;
    if (!Number.isFinite(loss)) {
      throw new Error(
        `training diverged: loss ${loss} at epoch ${epoch} ` +
          `(lambda=${cfg.lambda}, lr=${lr}, active bit ${activeBit})`
      );
    }

    exportWeights();
    if (epoch % cfg.reclusterEvery === 0) {
      plan = clusterPlan(wPath, planPath, clusters, width, cfg.seed);
    }
    const report = analyzeHd(wPath, planPath);
    metrics.push({
      epoch,
      loss,
      accuracy: model.accuracy(data.testX, data.testY),
      hd: report.hd,
      nhd: report.nhd,
    });

    if (epoch % cfg.epochsPerBit === 0) {
      model.codes(codes);
      freeze.freezeBit(activeBit, codes);
      freeze.project(model.latentW, q);
    }
  }

  const lines = ["epoch,loss,accuracy,hd,nhd"];
  for (const row of metrics) {
    lines.push(
      `${row.epoch},${row.loss},${row.accuracy},${row.hd},${row.nhd}`
    );
  }
  writeFileSync(join(cfg.out, "metrics.csv"), lines.join("\n") + "\n");
  exportWeights();
  copyFileSync(wPath, join(cfg.out, "w_final.json"));
  copyFileSync(planPath, join(cfg.out, "plan_final.json"));

  const last = metrics[metrics.length - 1];
  return {
    metrics,
    finalAccuracy: last.accuracy,
    finalHd: last.hd,
    finalNhd: last.nhd,
    outDir: cfg.out,
  };
}
