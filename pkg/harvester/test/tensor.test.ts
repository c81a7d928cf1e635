import { describe, expect, it } from "vitest";

import { Rng } from "../src/rng.js";
import {
  Tape, Tensor, add, addRowBias, addScaled, causalSelfAttention, ceMean,
  gatherRows, gelu, matmul, meanScalars,
} from "../src/tensor.js";

function randTensor(rng: Rng, rows: number, cols: number): Tensor {
  const t = new Tensor(rows, cols);
  for (let i = 0; i < t.size; i++) t.data[i] = rng.gauss();
  return t;
}

/** scalar loss: fixed random projection of an op's output, recorded on tape */
function weightedSum(tape: Tape, x: Tensor, w: Float64Array): Tensor {
  let s = 0;
  for (let i = 0; i < x.size; i++) s += w[i] * x.data[i];
  const out = new Tensor(1, 1, Float64Array.of(s));
  tape.record(() => {
    for (let i = 0; i < x.size; i++) x.grad[i] += w[i] * out.grad[0];
  });
  return out;
}

/**
 * Central finite-difference check of every input entry against the
 * analytic gradient of loss = w . vec(op(inputs)).
 */
function gradCheck(build: (tape: Tape, inputs: Tensor[]) => Tensor,
                   inputs: Tensor[], eps = 1e-5, tol = 1e-6): void {
  const probeSize = build(new Tape(), inputs).size;
  const wRng = new Rng(99);
  const w = new Float64Array(probeSize);
  for (let i = 0; i < w.length; i++) w[i] = wRng.gauss();

  const scalarLoss = (): number => {
    const tape = new Tape();
    return weightedSum(tape, build(tape, inputs), w).data[0];
  };

  for (const inp of inputs) inp.zeroGrad();
  const tape = new Tape();
  tape.backward(weightedSum(tape, build(tape, inputs), w));

  for (const inp of inputs) {
    for (let i = 0; i < inp.size; i++) {
      const keep = inp.data[i];
      inp.data[i] = keep + eps;
      const plus = scalarLoss();
      inp.data[i] = keep - eps;
      const minus = scalarLoss();
      inp.data[i] = keep;
      const fd = (plus - minus) / (2 * eps);
      expect(Math.abs(inp.grad[i] - fd)).toBeLessThanOrEqual(
        tol * Math.max(1, Math.abs(fd)));
    }
  }
}

describe("tensor basics", () => {
  it("rejects bad shapes", () => {
    expect(() => new Tensor(0, 3)).toThrow();
    const a = new Tensor(2, 3);
    const b = new Tensor(2, 3);
    expect(() => matmul(new Tape(), a, b)).toThrow(/matmul/);
  });

  it("matmul forward matches a hand example", () => {
    const a = new Tensor(2, 2, Float64Array.of(1, 2, 3, 4));
    const b = new Tensor(2, 2, Float64Array.of(5, 6, 7, 8));
    const out = matmul(new Tape(), a, b);
    expect(Array.from(out.data)).toEqual([19, 22, 43, 50]);
  });

  it("backward accumulates when a tensor is used twice", () => {
    // out = a + gate * a with gate = 3, loss = 0.5 * sum(out)
    const tape = new Tape();
    const a = new Tensor(1, 2, Float64Array.of(2, -1));
    const gate = new Tensor(1, 1, Float64Array.of(3));
    const out = addScaled(tape, a, a, gate);
    tape.backward(weightedSum(tape, out, Float64Array.of(0.5, 0.5)));
    // d(4a)/da = 4, halved by the weights
    expect(a.grad[0]).toBeCloseTo(2, 12);
    expect(a.grad[1]).toBeCloseTo(2, 12);
    expect(gate.grad[0]).toBeCloseTo(0.5 * (2 + -1), 12);
  });
});

describe("finite-difference gradient checks", () => {
  const rng = new Rng(5);

  it("matmul", () => {
    const a = randTensor(rng, 3, 4);
    const b = randTensor(rng, 4, 2);
    gradCheck((t, [x, y]) => matmul(t, x, y), [a, b]);
  });

  it("add and row bias", () => {
    const a = randTensor(rng, 3, 3);
    const b = randTensor(rng, 3, 3);
    gradCheck((t, [x, y]) => add(t, x, y), [a, b]);
    const x = randTensor(rng, 4, 3);
    const bias = randTensor(rng, 1, 3);
    gradCheck((t, [u, v]) => addRowBias(t, u, v), [x, bias]);
  });

  it("gelu", () => {
    const x = randTensor(rng, 3, 5);
    gradCheck((t, [u]) => gelu(t, u), [x]);
  });

  it("gated residual", () => {
    const h = randTensor(rng, 3, 4);
    const y = randTensor(rng, 3, 4);
    const gate = new Tensor(1, 1, Float64Array.of(0.8));
    gradCheck((t, [a, b, g]) => addScaled(t, a, b, g), [h, y, gate]);
  });

  it("causal attention, both head counts", () => {
    for (const heads of [1, 2]) {
      const q = randTensor(rng, 4, 4);
      const k = randTensor(rng, 4, 4);
      const v = randTensor(rng, 4, 4);
      gradCheck((t, [a, b, c]) => causalSelfAttention(t, a, b, c, heads),
                [q, k, v], 1e-5, 1e-5);
    }
  });

  it("embedding gather", () => {
    const table = randTensor(rng, 6, 3);
    const ids = Int32Array.of(2, 2, 0, 5);
    gradCheck((t, [tb]) => gatherRows(t, tb, ids), [table]);
  });

  it("cross-entropy mean", () => {
    const logits = randTensor(rng, 4, 5);
    const targets = Int32Array.of(1, 4, 0, -1);
    gradCheck((t, [lg]) => ceMean(t, lg, targets), [logits]);
  });
});

describe("attention structure", () => {
  it("is causal: late positions never affect early outputs", () => {
    const rng2 = new Rng(11);
    const q = randTensor(rng2, 4, 4);
    const k = randTensor(rng2, 4, 4);
    const v = randTensor(rng2, 4, 4);
    const before = causalSelfAttention(new Tape(), q, k, v, 2);
    for (const t of [q, k, v]) {
      for (let d = 0; d < 4; d++) t.data[3 * 4 + d] += 1.5;
    }
    const after = causalSelfAttention(new Tape(), q, k, v, 2);
    for (let i = 0; i < 3 * 4; i++) expect(after.data[i]).toBe(before.data[i]);
  });

  it("rejects head counts that do not divide the width", () => {
    const x = randTensor(new Rng(1), 2, 4);
    expect(() => causalSelfAttention(new Tape(), x, x, x, 3)).toThrow(/divide/);
  });
});

describe("loss plumbing", () => {
  it("ceMean ignores masked positions and averages the rest", () => {
    const logits = new Tensor(2, 2, Float64Array.of(0, 0, 100, 0));
    const loss = ceMean(new Tape(), logits, Int32Array.of(0, -1));
    expect(loss.data[0]).toBeCloseTo(Math.log(2), 12);
  });

  it("ceMean rejects all-masked targets", () => {
    const logits = new Tensor(2, 2);
    expect(() => ceMean(new Tape(), logits, Int32Array.of(-1, -1))).toThrow();
  });

  it("meanScalars averages and splits gradient evenly", () => {
    const tape = new Tape();
    const a = new Tensor(1, 1, Float64Array.of(2));
    const b = new Tensor(1, 1, Float64Array.of(4));
    const out = meanScalars(tape, [a, b]);
    expect(out.data[0]).toBe(3);
    tape.backward(out);
    expect(a.grad[0]).toBe(0.5);
    expect(b.grad[0]).toBe(0.5);
  });
});
