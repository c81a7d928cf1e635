/** Synthetic token corpus: sequences from a seeded first-order Markov chain.
 *
 * Each state prefers two successors, so the chain has low conditional
 * entropy and a small model can actually learn it in a few hundred steps.
 * The corpus hash pins the exact token ids, independent of how they were
 * generated.
 */

import { createHash } from "node:crypto";

import { Rng } from "./rng.js";

export interface Corpus {
  sequences: Int32Array[];
  vocabSize: number;
}

/**
 * chainSeed fixes the transition table, sampleSeed the draws from it, so
 * training and evaluation corpora can share one chain while holding
 * disjoint samples.  A single seed gives both roles to that seed.
 */
export function makeCorpus(vocabSize: number, seqLen: number, count: number,
                           chainSeed: number, sampleSeed = chainSeed): Corpus {
  if (vocabSize < 2) throw new Error(`vocabSize ${vocabSize} < 2`);
  if (seqLen < 2) throw new Error(`seqLen ${seqLen} < 2: nothing to predict`);
  if (count < 1) throw new Error(`count ${count} < 1`);
  const chainRng = new Rng(chainSeed);
  const trans: Float64Array[] = [];
  for (let s = 0; s < vocabSize; s++) {
    const row = new Float64Array(vocabSize).fill(0.1 / vocabSize);
    row[chainRng.int(vocabSize)] += 0.55;
    row[chainRng.int(vocabSize)] += 0.35;
    trans.push(row);
  }
  const rng = new Rng(sampleSeed);
  const sequences: Int32Array[] = [];
  for (let i = 0; i < count; i++) {
    const seq = new Int32Array(seqLen);
    seq[0] = rng.int(vocabSize);
    for (let t = 1; t < seqLen; t++) seq[t] = rng.categorical(trans[seq[t - 1]]);
    sequences.push(seq);
  }
  return { sequences, vocabSize };
}

/** sha-256 over the decimal token ids, one line per sequence */
export function corpusHash(corpus: Corpus): string {
  const h = createHash("sha256");
  for (const seq of corpus.sequences) {
    h.update(Array.from(seq).join(" "));
    h.update("\n");
  }
  return h.digest("hex");
}

/** next-token targets: position t predicts token t+1, the last predicts nothing */
export function nextTokenTargets(seq: Int32Array): Int32Array {
  const targets = new Int32Array(seq.length);
  for (let t = 0; t + 1 < seq.length; t++) targets[t] = seq[t + 1];
  targets[seq.length - 1] = -1;
  return targets;
}
