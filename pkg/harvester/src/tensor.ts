/** Minimal reverse-mode autodiff over dense float64 matrices.
 *
 * Every tensor is 2-D (scalars are 1x1).  A Tape records one backward
 * closure per op in forward order and replays them in reverse.  There is no
 * broadcasting and no views; the few fused ops (attention, cross-entropy)
 * exist because decomposing them would need both.
 *
 * All loops are plain and sequential, so results are bitwise reproducible
 * for a fixed input on a given platform.
 */

export class Tensor {
  readonly rows: number;
  readonly cols: number;
  data: Float64Array;
  grad: Float64Array;

  constructor(rows: number, cols: number, data?: Float64Array) {
    if (rows < 1 || cols < 1) throw new Error(`bad tensor shape ${rows}x${cols}`);
    this.rows = rows;
    this.cols = cols;
    this.data = data ?? new Float64Array(rows * cols);
    if (this.data.length !== rows * cols) {
      throw new Error(`data length ${this.data.length} != ${rows}x${cols}`);
    }
    this.grad = new Float64Array(rows * cols);
  }

  get size(): number {
    return this.rows * this.cols;
  }

  zeroGrad(): void {
    this.grad.fill(0);
  }
}

export class Tape {
  private ops: Array<() => void> = [];

  record(backward: () => void): void {
    this.ops.push(backward);
  }

  /** seed must be a 1x1 tensor; its grad is set to 1 and the tape replayed */
  backward(loss: Tensor): void {
    if (loss.size !== 1) throw new Error("backward seed must be scalar");
    loss.grad[0] = 1.0;
    for (let i = this.ops.length - 1; i >= 0; i--) this.ops[i]();
  }
}

export function matmul(tape: Tape, a: Tensor, b: Tensor): Tensor {
  if (a.cols !== b.rows) throw new Error(`matmul ${a.rows}x${a.cols} @ ${b.rows}x${b.cols}`);
  const R = a.rows, K = a.cols, N = b.cols;
  const out = new Tensor(R, N);
  const ad = a.data, bd = b.data, od = out.data;
  for (let r = 0; r < R; r++) {
    for (let k = 0; k < K; k++) {
      const av = ad[r * K + k];
      if (av === 0) continue;
      const bo = k * N, oo = r * N;
      for (let n = 0; n < N; n++) od[oo + n] += av * bd[bo + n];
    }
  }
  tape.record(() => {
    const g = out.grad, da = a.grad, db = b.grad;
    for (let r = 0; r < R; r++) {
      for (let n = 0; n < N; n++) {
        const gv = g[r * N + n];
        if (gv === 0) continue;
        for (let k = 0; k < K; k++) da[r * K + k] += gv * bd[k * N + n];
      }
      for (let k = 0; k < K; k++) {
        const av = ad[r * K + k];
        if (av === 0) continue;
        const bo = k * N, go = r * N;
        for (let n = 0; n < N; n++) db[bo + n] += av * g[go + n];
      }
    }
  });
  return out;
}

export function add(tape: Tape, a: Tensor, b: Tensor): Tensor {
  if (a.rows !== b.rows || a.cols !== b.cols) throw new Error("add shape mismatch");
  const out = new Tensor(a.rows, a.cols);
  for (let i = 0; i < out.size; i++) out.data[i] = a.data[i] + b.data[i];
  tape.record(() => {
    for (let i = 0; i < out.size; i++) {
      a.grad[i] += out.grad[i];
      b.grad[i] += out.grad[i];
    }
  });
  return out;
}

/** bias is 1xN, added to every row */
export function addRowBias(tape: Tape, x: Tensor, bias: Tensor): Tensor {
  if (bias.rows !== 1 || bias.cols !== x.cols) throw new Error("bias shape mismatch");
  const out = new Tensor(x.rows, x.cols);
  const N = x.cols;
  for (let r = 0; r < x.rows; r++) {
    for (let n = 0; n < N; n++) out.data[r * N + n] = x.data[r * N + n] + bias.data[n];
  }
  tape.record(() => {
    for (let r = 0; r < x.rows; r++) {
      for (let n = 0; n < N; n++) {
        x.grad[r * N + n] += out.grad[r * N + n];
        bias.grad[n] += out.grad[r * N + n];
      }
    }
  });
  return out;
}

export function gatherRows(tape: Tape, table: Tensor, ids: Int32Array): Tensor {
  const D = table.cols;
  const out = new Tensor(ids.length, D);
  for (let s = 0; s < ids.length; s++) {
    const id = ids[s];
    if (id < 0 || id >= table.rows) throw new Error(`row index ${id} out of range`);
    out.data.set(table.data.subarray(id * D, (id + 1) * D), s * D);
  }
  tape.record(() => {
    for (let s = 0; s < ids.length; s++) {
      const to = ids[s] * D, fo = s * D;
      for (let d = 0; d < D; d++) table.grad[to + d] += out.grad[fo + d];
    }
  });
  return out;
}

const GELU_C = Math.sqrt(2 / Math.PI);

export function gelu(tape: Tape, x: Tensor): Tensor {
  const out = new Tensor(x.rows, x.cols);
  for (let i = 0; i < x.size; i++) {
    const v = x.data[i];
    out.data[i] = 0.5 * v * (1 + Math.tanh(GELU_C * (v + 0.044715 * v * v * v)));
  }
  tape.record(() => {
    for (let i = 0; i < x.size; i++) {
      const v = x.data[i];
      const t = Math.tanh(GELU_C * (v + 0.044715 * v * v * v));
      const du = GELU_C * (1 + 3 * 0.044715 * v * v);
      x.grad[i] += out.grad[i] * (0.5 * (1 + t) + 0.5 * v * (1 - t * t) * du);
    }
  });
  return out;
}

/** out = base + gate * y, with gate a trainable 1x1 scalar */
export function addScaled(tape: Tape, base: Tensor, y: Tensor, gate: Tensor): Tensor {
  if (base.rows !== y.rows || base.cols !== y.cols) throw new Error("addScaled shape mismatch");
  if (gate.size !== 1) throw new Error("gate must be scalar");
  const out = new Tensor(base.rows, base.cols);
  const a = gate.data[0];
  for (let i = 0; i < out.size; i++) out.data[i] = base.data[i] + a * y.data[i];
  tape.record(() => {
    let acc = 0;
    for (let i = 0; i < out.size; i++) {
      const g = out.grad[i];
      base.grad[i] += g;
      y.grad[i] += a * g;
      acc += g * y.data[i];
    }
    gate.grad[0] += acc;
  });
  return out;
}

/** Multi-head scaled-dot-product attention with a causal mask, fused.
 *
 * q, k, v are SxD with D divisible by nHeads; position i attends to j <= i.
 * The per-head probability matrices are kept for the backward pass.
 */
export function causalSelfAttention(tape: Tape, q: Tensor, k: Tensor, v: Tensor,
                                    nHeads: number): Tensor {
  const S = q.rows, D = q.cols;
  if (k.rows !== S || v.rows !== S || k.cols !== D || v.cols !== D) {
    throw new Error("attention shape mismatch");
  }
  if (D % nHeads !== 0) throw new Error(`heads ${nHeads} do not divide width ${D}`);
  const Dh = D / nHeads;
  const scale = 1 / Math.sqrt(Dh);
  const out = new Tensor(S, D);
  const probs = new Float64Array(nHeads * S * S);

  for (let h = 0; h < nHeads; h++) {
    const off = h * Dh;
    for (let i = 0; i < S; i++) {
      const prow = (h * S + i) * S;
      let maxScore = -Infinity;
      for (let j = 0; j <= i; j++) {
        let s = 0;
        for (let d = 0; d < Dh; d++) s += q.data[i * D + off + d] * k.data[j * D + off + d];
        s *= scale;
        probs[prow + j] = s;
        if (s > maxScore) maxScore = s;
      }
      let z = 0;
      for (let j = 0; j <= i; j++) {
        const e = Math.exp(probs[prow + j] - maxScore);
        probs[prow + j] = e;
        z += e;
      }
      for (let j = 0; j <= i; j++) probs[prow + j] /= z;
      for (let j = 0; j <= i; j++) {
        const p = probs[prow + j];
        for (let d = 0; d < Dh; d++) out.data[i * D + off + d] += p * v.data[j * D + off + d];
      }
    }
  }

  tape.record(() => {
    const dp = new Float64Array(S);
    for (let h = 0; h < nHeads; h++) {
      const off = h * Dh;
      for (let i = 0; i < S; i++) {
        const prow = (h * S + i) * S;
        // dV and d(probs)
        for (let j = 0; j <= i; j++) {
          const p = probs[prow + j];
          let acc = 0;
          for (let d = 0; d < Dh; d++) {
            const g = out.grad[i * D + off + d];
            v.grad[j * D + off + d] += p * g;
            acc += g * v.data[j * D + off + d];
          }
          dp[j] = acc;
        }
        // softmax backward within the row
        let dot = 0;
        for (let j = 0; j <= i; j++) dot += probs[prow + j] * dp[j];
        for (let j = 0; j <= i; j++) {
          const ds = probs[prow + j] * (dp[j] - dot) * scale;
          for (let d = 0; d < Dh; d++) {
            q.grad[i * D + off + d] += ds * k.data[j * D + off + d];
            k.grad[j * D + off + d] += ds * q.data[i * D + off + d];
          }
        }
      }
    }
  });
  return out;
}

/** Mean cross-entropy over the positions whose target is >= 0.
 *
 * logits is SxV; targets[s] < 0 marks a position that predicts nothing.
 */
export function ceMean(tape: Tape, logits: Tensor, targets: Int32Array): Tensor {
  const S = logits.rows, V = logits.cols;
  if (targets.length !== S) throw new Error("targets length mismatch");
  let count = 0;
  for (let s = 0; s < S; s++) if (targets[s] >= 0) count++;
  if (count === 0) throw new Error("no predicted positions");

  const soft = new Float64Array(S * V);
  let total = 0;
  for (let s = 0; s < S; s++) {
    const t = targets[s];
    if (t < 0) continue;
    if (t >= V) throw new Error(`target ${t} out of vocab ${V}`);
    let mx = -Infinity;
    for (let c = 0; c < V; c++) if (logits.data[s * V + c] > mx) mx = logits.data[s * V + c];
    let z = 0;
    for (let c = 0; c < V; c++) {
      const e = Math.exp(logits.data[s * V + c] - mx);
      soft[s * V + c] = e;
      z += e;
    }
    for (let c = 0; c < V; c++) soft[s * V + c] /= z;
    total += -Math.log(soft[s * V + t]);
  }
  const out = new Tensor(1, 1, Float64Array.of(total / count));
  tape.record(() => {
    const g = out.grad[0] / count;
    for (let s = 0; s < S; s++) {
      const t = targets[s];
      if (t < 0) continue;
      for (let c = 0; c < V; c++) {
        logits.grad[s * V + c] += g * (soft[s * V + c] - (c === t ? 1 : 0));
      }
    }
  });
  return out;
}

/** mean of scalar tensors, itself a scalar */
export function meanScalars(tape: Tape, xs: Tensor[]): Tensor {
  if (xs.length === 0) throw new Error("empty mean");
  let total = 0;
  for (const x of xs) {
    if (x.size !== 1) throw new Error("meanScalars needs scalars");
    total += x.data[0];
  }
  const out = new Tensor(1, 1, Float64Array.of(total / xs.length));
  tape.record(() => {
    const g = out.grad[0] / xs.length;
    for (const x of xs) x.grad[0] += g;
  });
  return out;
}
