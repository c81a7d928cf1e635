/** Harvesting, ablation ground truth, and the proxy-quality report.
 *
 * The model is trained once per config (memoized) on an internally
 * generated training corpus derived from cfg.seed.  The corpus handed to
 * harvest and ablate is the calibration set; both operations walk exactly
 * the same sequences and token positions, which is what makes the
 * quadratic-proxy comparison honest.
 */

import { Corpus, corpusHash, makeCorpus } from "./corpus.js";
import { GradientDiagnostic, diagnostic, readGrad1, writeGrad1, writeSidecar } from "./grad1.js";
import { REFERENCE_CONFIG, ToyModel, ToyModelConfig, train } from "./model.js";
import { spearman } from "./spearman.js";
import { Tape } from "./tensor.js";

const TRAIN_SEQUENCES = 384;
const DEFAULT_CALIBRATION_SAMPLES = 64;

const modelCache = new Map<string, ToyModel>();

function cfgKey(cfg: ToyModelConfig): string {
  return [cfg.nBlocks, cfg.dModel, cfg.nHeads, cfg.dFf, cfg.vocabSize,
          cfg.seqLen, cfg.trainSteps, cfg.seed].join("/");
}

/** deterministic train-once-per-config access point */
export function trainedModel(cfg: ToyModelConfig): ToyModel {
  const key = cfgKey(cfg);
  const hit = modelCache.get(key);
  if (hit) return hit;
  const model = new ToyModel(cfg);
  // same chain as the calibration corpus, disjoint sample stream
  const trainCorpus = makeCorpus(cfg.vocabSize, cfg.seqLen, TRAIN_SEQUENCES,
                                 cfg.seed >>> 0, (cfg.seed + 1) >>> 0);
  train(model, trainCorpus);
  modelCache.set(key, model);
  return model;
}

/** the calibration corpus that goes with a config, derived from its seed */
export function calibrationCorpus(cfg: ToyModelConfig,
                                  count = DEFAULT_CALIBRATION_SAMPLES): Corpus {
  return makeCorpus(cfg.vocabSize, cfg.seqLen, count,
                    cfg.seed >>> 0, (cfg.seed + 2) >>> 0);
}

/** one gradient row per sample: d(sample loss)/d(alpha) at alpha = 1 */
export function perSampleAlphaGradients(model: ToyModel, corpus: Corpus): Float64Array[] {
  if (!model.trained) throw new Error("model is untrained; train it before harvesting");
  if (corpus.vocabSize !== model.cfg.vocabSize) throw new Error("corpus vocab mismatch");
  const rows: Float64Array[] = [];
  for (const seq of corpus.sequences) {
    model.zeroGrads();
    const tape = new Tape();
    tape.backward(model.loss(tape, seq));
    const row = new Float64Array(model.cfg.nBlocks);
    for (let i = 0; i < row.length; i++) row[i] = model.alphas[i].grad[0];
    rows.push(row);
  }
  return rows;
}

export interface HarvestResult {
  rows: Float64Array[];
  diagnostic: GradientDiagnostic;
  sidecarPath: string;
}

export function harvestFromModel(model: ToyModel, corpus: Corpus, m: number,
                                 out: string): HarvestResult {
  if (m !== corpus.sequences.length) {
    throw new Error(`m = ${m} must equal the calibration corpus size ` +
                    `${corpus.sequences.length}: ablation replays the same samples`);
  }
  const rows = perSampleAlphaGradients(model, corpus);
  const n = model.cfg.nBlocks;
  writeGrad1(rows, n, out);
  const diag = diagnostic(rows, n);
  const sidecarPath = writeSidecar({
    config: model.cfg,
    corpus_sha256: corpusHash(corpus),
    token_aggregation: "mean",
    samples: m,
    diagnostic: diag,
  }, out);
  return { rows, diagnostic: diag, sidecarPath };
}

export function harvest(cfg: ToyModelConfig, corpus: Corpus, m: number,
                        out: string): HarvestResult {
  return harvestFromModel(trainedModel(cfg), corpus, m, out);
}

export interface AblationRecord {
  removed: number[];
  actual_delta_loss: number;
}

export function ablate(cfg: ToyModelConfig, corpus: Corpus,
                       removed: number[]): AblationRecord {
  const model = trainedModel(cfg);
  const n = model.cfg.nBlocks;
  const seen = new Set<number>();
  for (const i of removed) {
    if (!Number.isInteger(i) || i < 0 || i >= n) {
      throw new Error(`block index ${i} out of range [0, ${n})`);
    }
    if (seen.has(i)) throw new Error(`block index ${i} removed twice`);
    seen.add(i);
  }
  const full = model.evalLoss(corpus.sequences);
  const gates = new Array<number>(n).fill(1);
  for (const i of removed) gates[i] = 0;
  model.setAlphas(gates);
  const pruned = model.evalLoss(corpus.sequences);
  model.setAlphas(new Array<number>(n).fill(1));
  return { removed: [...removed].sort((a, b) => a - b),
           actual_delta_loss: pruned - full };
}

/** central finite difference of the mean loss along one gate */
export function fdAlphaGradient(model: ToyModel, corpus: Corpus, block: number,
                                eps = 1e-3): number {
  const n = model.cfg.nBlocks;
  if (block < 0 || block >= n) throw new Error(`block ${block} out of range`);
  const gates = new Array<number>(n).fill(1);
  gates[block] = 1 + eps;
  model.setAlphas(gates);
  const plus = model.evalLoss(corpus.sequences);
  gates[block] = 1 - eps;
  model.setAlphas(gates);
  const minus = model.evalLoss(corpus.sequences);
  model.setAlphas(new Array<number>(n).fill(1));
  return (plus - minus) / (2 * eps);
}

export interface QualityReport {
  spearman_rank_corr: number | null;
  per_config: Array<{ removed: number[]; predicted_delta: number; actual_delta: number }>;
}

/** predicted x^T H x per ablation vs the measured loss change */
export function taylorQualityReport(gradientsPath: string,
                                    ablations: AblationRecord[]): QualityReport {
  const { rows, n } = readGrad1(gradientsPath);
  const h = new Float64Array(n * n);
  for (const row of rows) {
    for (let i = 0; i < n; i++) {
      for (let j = 0; j < n; j++) h[i * n + j] += row[i] * row[j];
    }
  }
  for (let i = 0; i < h.length; i++) h[i] /= rows.length;

  const table = ablations.map((rec) => {
    for (const i of rec.removed) {
      if (i < 0 || i >= n) {
        throw new Error(`ablation index ${i} does not fit ${n} blocks`);
      }
    }
    let predicted = 0;
    for (const i of rec.removed) {
      for (const j of rec.removed) predicted += h[i * n + j];
    }
    return { removed: [...rec.removed], predicted_delta: predicted,
             actual_delta: rec.actual_delta_loss };
  });
  return {
    spearman_rank_corr: spearman(table.map((r) => r.predicted_delta),
                                 table.map((r) => r.actual_delta)),
    per_config: table,
  };
}

export { REFERENCE_CONFIG };
