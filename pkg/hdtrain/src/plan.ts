/** JSON file formats shared with the `hdopt` CLI, and subprocess helpers.
 *
 * These files are the entire contract with the optimizer package: weight
 * bundles and plans go over disk, metrics and plans come back over stdout.
 */

import { spawnSync } from "node:child_process";
import { readFileSync, writeFileSync } from "node:fs";

export interface PlanSegment {
  columns: number[];
  order: number[];
}

export interface Plan {
  width: number;
  segments: PlanSegment[];
  meta?: Record<string, unknown>;
}

export interface WeightBundle {
  name: string;
  bits: number;
  shape: [number, number]; // [rows, cols]
  data: number[]; // row-major codes
}

export function saveWeightBundle(
  path: string,
  name: string,
  bits: number,
  rows: number,
  cols: number,
  codes: ArrayLike<number>
): void {
  const bundle: WeightBundle = {
    name,
    bits,
    shape: [rows, cols],
    data: Array.from(codes as ArrayLike<number>, Number),
  };
  writeFileSync(path, JSON.stringify(bundle) + "\n");
}

export function loadPlan(path: string): Plan {
  const plan = JSON.parse(readFileSync(path, "utf-8")) as Plan;
  if (!Array.isArray(plan.segments) || typeof plan.width !== "number") {
    throw new Error(`${path}: not a plan file`);
  }
  return plan;
}

export function identityPlan(rows: number, cols: number): Plan {
  const columns = Array.from({ length: cols }, (_, i) => i);
  const order = Array.from({ length: rows }, (_, i) => i);
  return { width: cols, segments: [{ columns, order }] };
}

const HDOPT = process.env.HDOPT_BIN ?? "hdopt";

/** Run the optimizer CLI; throw with stderr attached on any failure. */
export function runHdopt(args: string[]): string {
  const res = spawnSync(HDOPT, args, { encoding: "utf-8" });
  if (res.error) {
    throw new Error(`failed to launch ${HDOPT}: ${res.error.message}`);
  }
  if (res.status !== 0) {
    throw new Error(
      `${HDOPT} ${args.join(" ")} exited ${res.status}: ${res.stderr.trim()}`
    );
  }
  return res.stdout;
}

export interface HdReport {
  hd: number;
  nhd: number;
}

/** `hdopt analyze` on a weight bundle, optionally under a plan file. */
export function analyzeHd(weightPath: string, planPath?: string): HdReport {
  const args = ["analyze", "-i", weightPath];
  if (planPath) args.push("-p", planPath);
  const out = JSON.parse(runHdopt(args));
  return { hd: out.hd, nhd: out.nhd };
}

/** `hdopt cluster`: refresh the streaming plan for the current weights. */
export function clusterPlan(
  weightPath: string,
  planPath: string,
  clusters: number,
  width: number,
  seed: number
): Plan {
  runHdopt([
    "cluster",
    "-i",
    weightPath,
    "--clusters",
    String(clusters),
    "--width",
    String(width),
    "--seed",
    String(seed),
    "-o",
    planPath,
  ]);
  return loadPlan(planPath);
}
