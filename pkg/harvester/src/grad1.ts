/** GRAD-1 file io and the JSON metadata sidecar.
 *
 * GRAD-1 is the cross-component contract: header "GRAD-1 <m> <n>", then m
 * lines of n space-separated floats, one row per calibration sample.
 * Numbers are written with the shortest round-trip decimal form.
 */

import { writeFileSync, readFileSync } from "node:fs";

import { ToyModelConfig } from "./model.js";

export function formatFloat(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite value ${x}`);
  // String(-0) is "0"; keep the sign bit so the round trip is exact
  return Object.is(x, -0) ? "-0" : String(x);
}

export function writeGrad1(rows: Float64Array[], n: number, path: string): void {
  const lines = [`GRAD-1 ${rows.length} ${n}`];
  for (const row of rows) {
    if (row.length !== n) throw new Error(`row width ${row.length} != ${n}`);
    lines.push(Array.from(row, formatFloat).join(" "));
  }
  writeFileSync(path, lines.join("\n") + "\n");
}

export function readGrad1(path: string): { rows: Float64Array[]; n: number } {
  const lines = readFileSync(path, "utf8").split("\n");
  const header = (lines[0] ?? "").trim().split(/\s+/);
  if (header.length !== 3 || header[0] !== "GRAD-1") {
    throw new Error(`${path}: line 1: expected "GRAD-1 <m> <n>" header`);
  }
  const m = Number(header[1]), n = Number(header[2]);
  if (!Number.isInteger(m) || !Number.isInteger(n) || m < 1 || n < 1) {
    throw new Error(`${path}: line 1: bad dimensions`);
  }
  const rows: Float64Array[] = [];
  for (let i = 0; i < m; i++) {
    const text = lines[1 + i];
    if (text === undefined || text.trim() === "") {
      throw new Error(`${path}: expected ${m} rows, found ${i}`);
    }
    const parts = text.trim().split(/\s+/);
    if (parts.length !== n) {
      throw new Error(`${path}: line ${i + 2}: expected ${n} values, found ${parts.length}`);
    }
    const row = new Float64Array(n);
    for (let j = 0; j < n; j++) {
      const v = Number(parts[j]);
      if (!Number.isFinite(v)) throw new Error(`${path}: line ${i + 2}: bad value ${parts[j]}`);
      row[j] = v;
    }
    rows.push(row);
  }
  for (let i = 1 + m; i < lines.length; i++) {
    if (lines[i].trim() !== "") throw new Error(`${path}: line ${i + 1}: trailing data`);
  }
  return { rows, n };
}

export interface GradientDiagnostic {
  mean_grad_norm: number;
  per_block_mean: number[];
  per_block_rms: number[];
}

export function diagnostic(rows: Float64Array[], n: number): GradientDiagnostic {
  const mean = new Float64Array(n);
  const sq = new Float64Array(n);
  for (const row of rows) {
    for (let j = 0; j < n; j++) {
      mean[j] += row[j];
      sq[j] += row[j] * row[j];
    }
  }
  let norm = 0;
  for (let j = 0; j < n; j++) {
    mean[j] /= rows.length;
    sq[j] = Math.sqrt(sq[j] / rows.length);
    norm += mean[j] * mean[j];
  }
  return {
    mean_grad_norm: Math.sqrt(norm),
    per_block_mean: Array.from(mean),
    per_block_rms: Array.from(sq),
  };
}

export interface Sidecar {
  config: ToyModelConfig;
  corpus_sha256: string;
  token_aggregation: "mean";
  samples: number;
  diagnostic: GradientDiagnostic;
}

export function writeSidecar(sidecar: Sidecar, gradPath: string): string {
  const path = gradPath + ".meta.json";
  writeFileSync(path, JSON.stringify(sidecar, null, 2) + "\n");
  return path;
}
