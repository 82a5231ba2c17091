#!/usr/bin/env node
/** Command-line entry point.
 *
 *   hdtrain --lambda 0.05 --bits 4 --epochs-per-bit 6 \
 *           --recluster-every 1 --seed 0 --out run_dir/
 *
 * Writes run_dir/metrics.csv (epoch,loss,accuracy,hd,nhd), the final
 * quantized weight bundle, and the final streaming plan.
 */

import { parseArgs } from "node:util";

import { freezeAndRegularizeTrain } from "./train.js";

const USAGE =
  "usage: hdtrain --lambda L [--bits B] [--epochs-per-bit E] " +
  "[--recluster-every R] [--seed S] [--lr LR] --out DIR";

export function main(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        lambda: { type: "string" },
        bits: { type: "string", default: "4" },
        "epochs-per-bit": { type: "string", default: "6" },
        "recluster-every": { type: "string", default: "1" },
        seed: { type: "string", default: "0" },
        lr: { type: "string" },
        out: { type: "string" },
        help: { type: "boolean", default: false },
      },
      strict: true,
    }));
  } catch (err) {
    console.error((err as Error).message);
    console.error(USAGE);
    return 1;
  }
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  if (values.lambda === undefined || values.out === undefined) {
    console.error("hdtrain: --lambda and --out are required");
    console.error(USAGE);
    return 1;
  }

  try {
    const result = freezeAndRegularizeTrain({
      lambda: Number(values.lambda),
      bits: Number(values.bits),
      epochsPerBit: Number(values["epochs-per-bit"]),
      reclusterEvery: Number(values["recluster-every"]),
      seed: Number(values.seed),
      lr: values.lr === undefined ? undefined : Number(values.lr),
      out: values.out,
    });
    console.log(
      JSON.stringify({
        out: result.outDir,
        epochs: result.metrics.length,
        accuracy: result.finalAccuracy,
        hd: result.finalHd,
        nhd: result.finalNhd,
      })
    );
    return 0;
  } catch (err) {
    if (err instanceof RangeError) {
      console.error(`hdtrain: invalid arguments: ${err.message}`);
      return 1;
    }
    console.error(`hdtrain: ${(err as Error).message}`);
    return 2;
  }
}

process.exit(main(process.argv.slice(2)));
