import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { REFERENCE_CONFIG, calibrationCorpus, harvest } from "../src/harvest.js";

/**
 * Drives the solver package through its command line exactly as a user
 * would: harvested gradients in, solution documents out.  Requires the
 * python package to be installed; everything here crosses the process
 * boundary through files and argv only.
 */

const dir = mkdtempSync(join(tmpdir(), "e2e-"));
afterAll(() => rmSync(dir, { recursive: true, force: true }));

const gradPath = join(dir, "e2e.grad");
const hessPath = join(dir, "e2e.hess");
const solPath = join(dir, "e2e.solutions.json");

let rows: Float64Array[];

function solver(...args: string[]) {
  return spawnSync("python3", ["-m", "blockspectrum.cli", ...args],
                   { encoding: "utf8" });
}

const CLI_JS = new URL("../dist/cli.js", import.meta.url).pathname;

function harvesterCli(...args: string[]) {
  return spawnSync("node", [CLI_JS, ...args], { encoding: "utf8" });
}

/** independent ground-truth energy: (1/m) sum_k (sum_{i in x} row_k[i])^2 */
function energyFromRows(removed: number[]): number {
  let total = 0;
  for (const row of rows) {
    let s = 0;
    for (const i of removed) s += row[i];
    total += s * s;
  }
  return total / rows.length;
}

beforeAll(() => {
  const corpus = calibrationCorpus(REFERENCE_CONFIG);
  rows = harvest(REFERENCE_CONFIG, corpus, corpus.sequences.length, gradPath).rows;
}, 240_000);

describe("solver pipeline on harvested gradients", () => {
  it("build-hessian accepts the GRAD-1 file", () => {
    const r = solver("build-hessian", "--gradients", gradPath, "--out", hessPath);
    expect(r.status).toBe(0);
    expect(r.stderr).toMatch(/samples=64/);
    expect(r.stderr).toMatch(/blocks=6/);
    expect(readFileSync(hessPath, "utf8").startsWith("HESS-1 6")).toBe(true);
  });

  it("exact solve emits the true spectrum for pairs", () => {
    const r = solver("solve", "--hessian", hessPath, "--m", "2", "--k", "10",
                     "--method", "exact", "--out", solPath);
    expect(r.status).toBe(0);
    const doc = JSON.parse(readFileSync(solPath, "utf8"));
    expect(doc.solutions.length).toBe(10);
    expect(doc.solutions.map((s: { rank: number }) => s.rank))
      .toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);

    // all 15 pairs, independently scored from the raw gradient rows
    const scored: Array<{ removed: number[]; energy: number }> = [];
    for (let i = 0; i < 6; i++) {
      for (let j = i + 1; j < 6; j++) {
        scored.push({ removed: [i, j], energy: energyFromRows([i, j]) });
      }
    }
    scored.sort((a, b) => a.energy - b.energy);
    for (let r2 = 0; r2 < 10; r2++) {
      const got = doc.solutions[r2];
      expect(Math.abs(got.energy - scored[r2].energy))
        .toBeLessThanOrEqual(1e-9 * Math.max(1, Math.abs(scored[r2].energy)));
    }
    expect(doc.solutions[0].removed).toEqual(scored[0].removed);
  });

  it("the document passes the solver's own schema", () => {
    const check = spawnSync("python3", ["-c", [
      "import json, sys",
      "import jsonschema",
      "import blockspectrum as bs",
      "doc = bs.load_document(sys.argv[1])",
      "schema = json.loads(bs.schema_path().read_text())",
      "jsonschema.validate(json.load(open(sys.argv[1])), schema)",
      "print('ok', len(doc['solutions']))",
    ].join("\n"), solPath], { encoding: "utf8" });
    expect(check.stderr).not.toMatch(/Traceback/);
    expect(check.status).toBe(0);
    expect(check.stdout).toContain("ok 10");
  });

  it("analyze summarizes the spectrum", () => {
    const r = solver("analyze", "--solutions", solPath, "--topk", "10",
                     "--select", "3");
    expect(r.status).toBe(0);
    const report = JSON.parse(r.stdout);
    expect(report.frequency.counts.length).toBe(6);
    const totalMentions = report.frequency.counts
      .reduce((a: number, b: number) => a + b, 0);
    expect(totalMentions).toBe(10 * 2);
    expect(report.selected.length).toBe(3);
  });
});

describe("harvester command line", () => {
  // short recipe: these spawns retrain from scratch in a fresh process
  const steps = ["--train-steps", "30"];

  it("harvest writes the gradient file and sidecar", () => {
    const out = join(dir, "cli.grad");
    const r = harvesterCli("harvest", "--out", out, ...steps);
    expect(r.status).toBe(0);
    expect(r.stderr).toMatch(/mean_grad_norm/);
    expect(existsSync(out)).toBe(true);
    expect(existsSync(out + ".meta.json")).toBe(true);
    expect(readFileSync(out, "utf8").startsWith("GRAD-1 64 6")).toBe(true);
  }, 120_000);

  it("ablate prints a record", () => {
    const r = harvesterCli("ablate", "--blocks", "0,2", ...steps);
    expect(r.status).toBe(0);
    const rec = JSON.parse(r.stdout);
    expect(rec.removed).toEqual([0, 2]);
    expect(typeof rec.actual_delta_loss).toBe("number");
  }, 120_000);

  it("report computes the quality table", () => {
    const out = join(dir, "cli2.grad");
    expect(harvesterCli("harvest", "--out", out, ...steps).status).toBe(0);
    const r = harvesterCli("report", "--gradients", out, ...steps);
    expect(r.status).toBe(0);
    const report = JSON.parse(r.stdout);
    expect(report.per_config.length).toBe(6);
    expect(typeof report.spearman_rank_corr).toBe("number");
  }, 240_000);

  it("rejects unknown commands and missing flags", () => {
    expect(harvesterCli("frobnicate").status).toBe(2);
    expect(harvesterCli("harvest").status).toBe(2);
    expect(harvesterCli("harvest").stderr).toMatch(/--out/);
  });
});
