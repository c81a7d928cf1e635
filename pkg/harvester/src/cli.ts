/** Small front door: harvest gradient files for the solver pipeline.
 *
 *   node dist/cli.js harvest --out run.grad [--samples 64] [--seed 7]
 *   node dist/cli.js ablate --blocks 0,2 [--seed 7]
 *   node dist/cli.js report --gradients run.grad [--seed 7]
 */

import { parseArgs } from "node:util";

import { REFERENCE_CONFIG } from "./model.js";
import {
  ablate, calibrationCorpus, harvest, taylorQualityReport, trainedModel,
} from "./harvest.js";

function main(): number {
  const [command, ...rest] = process.argv.slice(2);
  const { values } = parseArgs({
    args: rest,
    options: {
      out: { type: "string" },
      samples: { type: "string", default: "64" },
      seed: { type: "string", default: String(REFERENCE_CONFIG.seed) },
      "train-steps": { type: "string", default: String(REFERENCE_CONFIG.trainSteps) },
      blocks: { type: "string" },
      gradients: { type: "string" },
    },
  });
  const cfg = {
    ...REFERENCE_CONFIG,
    seed: Number(values.seed),
    trainSteps: Number(values["train-steps"]),
  };
  const samples = Number(values.samples);

  if (command === "harvest") {
    if (!values.out) throw new Error("harvest needs --out");
    const corpus = calibrationCorpus(cfg, samples);
    const result = harvest(cfg, corpus, samples, values.out);
    console.error(`wrote ${values.out} (${samples} rows) and ${result.sidecarPath}`);
    console.error(`mean_grad_norm=${result.diagnostic.mean_grad_norm.toPrecision(4)}`);
    return 0;
  }
  if (command === "ablate") {
    if (!values.blocks) throw new Error("ablate needs --blocks i,j,...");
    const removed = values.blocks.split(",").map(Number);
    const record = ablate(cfg, calibrationCorpus(cfg, samples), removed);
    console.log(JSON.stringify(record));
    return 0;
  }
  if (command === "report") {
    if (!values.gradients) throw new Error("report needs --gradients");
    const corpus = calibrationCorpus(cfg, samples);
    trainedModel(cfg);
    const ablations = [];
    for (let i = 0; i < cfg.nBlocks; i++) ablations.push(ablate(cfg, corpus, [i]));
    console.log(JSON.stringify(taylorQualityReport(values.gradients, ablations), null, 2));
    return 0;
  }
  console.error("usage: cli.js harvest|ablate|report [options]");
  return 2;
}

try {
  process.exit(main());
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(2);
}
