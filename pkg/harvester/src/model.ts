/** A small gated decoder-only transformer.
 *
 * Block i computes
 *
 *     h <- h + alpha_i * ATTN(h)
 *     h <- h + alpha_i * FFN(h)
 *
 * with a single gate alpha_i shared by both sublayers, so dL/dalpha_i sums
 * the attention and feed-forward contributions.  Gates sit at 1 and are
 * never trained; they exist to be differentiated and ablated.
 */

import { Corpus, nextTokenTargets } from "./corpus.js";
import { Rng } from "./rng.js";
import {
  Tape, Tensor, add, addRowBias, addScaled, causalSelfAttention, ceMean,
  gatherRows, gelu, matmul, meanScalars,
} from "./tensor.js";

export interface ToyModelConfig {
  nBlocks: number;
  dModel: number;
  nHeads: number;
  dFf: number;
  vocabSize: number;
  seqLen: number;
  trainSteps: number;
  seed: number;
}

export const REFERENCE_CONFIG: ToyModelConfig = {
  nBlocks: 6,
  dModel: 64,
  nHeads: 2,
  dFf: 128,
  vocabSize: 16,
  seqLen: 12,
  trainSteps: 250,
  seed: 7,
};

function checkConfig(cfg: ToyModelConfig): void {
  if (cfg.nBlocks < 4 || cfg.nBlocks > 12) {
    throw new Error(`nBlocks must be in [4, 12], got ${cfg.nBlocks}`);
  }
  if (cfg.dModel % cfg.nHeads !== 0) {
    throw new Error(`nHeads ${cfg.nHeads} must divide dModel ${cfg.dModel}`);
  }
  for (const [name, v] of Object.entries(cfg)) {
    if (!Number.isInteger(v) || (name !== "seed" && v < 1)) {
      throw new Error(`config field ${name} must be a positive integer, got ${v}`);
    }
  }
}

interface Block {
  wq: Tensor;
  wk: Tensor;
  wv: Tensor;
  wo: Tensor;
  w1: Tensor;
  b1: Tensor;
  w2: Tensor;
  b2: Tensor;
}

export class ToyModel {
  readonly cfg: ToyModelConfig;
  readonly embedding: Tensor;
  readonly positional: Tensor;
  readonly unembedding: Tensor;
  readonly blocks: Block[];
  readonly alphas: Tensor[];
  trained = false;

  constructor(cfg: ToyModelConfig) {
    checkConfig(cfg);
    this.cfg = cfg;
    const rng = new Rng(cfg.seed >>> 0 || 1);
    const D = cfg.dModel;
    const init = (rows: number, cols: number, std: number) => {
      const t = new Tensor(rows, cols);
      for (let i = 0; i < t.size; i++) t.data[i] = rng.gauss() * std;
      return t;
    };
    this.embedding = init(cfg.vocabSize, D, 0.08);
    this.positional = init(cfg.seqLen, D, 0.08);
    this.unembedding = init(D, cfg.vocabSize, 0.08);
    const wstd = 0.5 / Math.sqrt(D);
    this.blocks = [];
    for (let b = 0; b < cfg.nBlocks; b++) {
      this.blocks.push({
        wq: init(D, D, wstd),
        wk: init(D, D, wstd),
        wv: init(D, D, wstd),
        wo: init(D, D, wstd),
        w1: init(D, cfg.dFf, wstd),
        b1: new Tensor(1, cfg.dFf),
        w2: init(cfg.dFf, D, 0.5 / Math.sqrt(cfg.dFf)),
        b2: new Tensor(1, D),
      });
    }
    this.alphas = [];
    for (let b = 0; b < cfg.nBlocks; b++) {
      this.alphas.push(new Tensor(1, 1, Float64Array.of(1.0)));
    }
  }

  /** weights only; the gates are deliberately absent */
  parameters(): Tensor[] {
    const ps = [this.embedding, this.positional, this.unembedding];
    for (const b of this.blocks) {
      ps.push(b.wq, b.wk, b.wv, b.wo, b.w1, b.b1, b.w2, b.b2);
    }
    return ps;
  }

  setAlphas(values: number[]): void {
    if (values.length !== this.cfg.nBlocks) {
      throw new Error(`expected ${this.cfg.nBlocks} gate values, got ${values.length}`);
    }
    for (let i = 0; i < values.length; i++) this.alphas[i].data[0] = values[i];
  }

  getAlphas(): number[] {
    return this.alphas.map((a) => a.data[0]);
  }

  /** per-sample loss: mean cross-entropy over the sample's predicted tokens */
  loss(tape: Tape, seq: Int32Array): Tensor {
    if (seq.length !== this.cfg.seqLen) {
      throw new Error(`sequence length ${seq.length} != ${this.cfg.seqLen}`);
    }
    let h = add(tape, gatherRows(tape, this.embedding, seq), this.positionalView(tape));
    for (let i = 0; i < this.cfg.nBlocks; i++) {
      const blk = this.blocks[i];
      const alpha = this.alphas[i];
      const q = matmul(tape, h, blk.wq);
      const k = matmul(tape, h, blk.wk);
      const v = matmul(tape, h, blk.wv);
      const att = matmul(tape, causalSelfAttention(tape, q, k, v, this.cfg.nHeads), blk.wo);
      h = addScaled(tape, h, att, alpha);
      const f = matmul(tape, gelu(tape, addRowBias(tape, matmul(tape, h, blk.w1), blk.b1)), blk.w2);
      h = addScaled(tape, h, addRowBias(tape, f, blk.b2), alpha);
    }
    const logits = matmul(tape, h, this.unembedding);
    return ceMean(tape, logits, nextTokenTargets(seq));
  }

  private positionalView(tape: Tape): Tensor {
    // full-length sequences only, so the positional table is used whole
    const ids = new Int32Array(this.cfg.seqLen);
    for (let t = 0; t < ids.length; t++) ids[t] = t;
    return gatherRows(tape, this.positional, ids);
  }

  /** mean loss over a list of sequences, without building gradients */
  evalLoss(sequences: Int32Array[]): number {
    let total = 0;
    for (const seq of sequences) {
      const tape = new Tape();
      total += this.loss(tape, seq).data[0];
    }
    return total / sequences.length;
  }

  zeroGrads(): void {
    for (const p of this.parameters()) p.zeroGrad();
    for (const a of this.alphas) a.zeroGrad();
  }
}

/** Adam on the weights, gates untouched.  Returns the loss curve. */
export function train(model: ToyModel, corpus: Corpus, batchSize = 8,
                      lr = 3e-3): number[] {
  if (corpus.vocabSize !== model.cfg.vocabSize) {
    throw new Error("corpus vocab does not match model");
  }
  const params = model.parameters();
  const m = params.map((p) => new Float64Array(p.size));
  const v = params.map((p) => new Float64Array(p.size));
  const beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const seqs = corpus.sequences;
  const history: number[] = [];

  for (let step = 0; step < model.cfg.trainSteps; step++) {
    model.zeroGrads();
    const tape = new Tape();
    const losses: Tensor[] = [];
    for (let j = 0; j < batchSize; j++) {
      losses.push(model.loss(tape, seqs[(step * batchSize + j) % seqs.length]));
    }
    const batchLoss = meanScalars(tape, losses);
    tape.backward(batchLoss);
    history.push(batchLoss.data[0]);

    const t = step + 1;
    const corr1 = 1 - Math.pow(beta1, t);
    const corr2 = 1 - Math.pow(beta2, t);
    for (let p = 0; p < params.length; p++) {
      const par = params[p], mp = m[p], vp = v[p];
      for (let i = 0; i < par.size; i++) {
        const g = par.grad[i];
        mp[i] = beta1 * mp[i] + (1 - beta1) * g;
        vp[i] = beta2 * vp[i] + (1 - beta2) * g * g;
        par.data[i] -= lr * (mp[i] / corr1) / (Math.sqrt(vp[i] / corr2) + eps);
      }
    }
  }
  model.trained = true;
  return history;
}
