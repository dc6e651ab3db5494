/** Byte-for-byte agreement with the Python CLI on shared fixtures.
 *
 * Each golden case was produced by the reference CLI (see
 * scripts/make_golden.py): a window DMAP, a head CSV, a coarse DMAP, and
 * the CLI's generate/reconstruct outputs.  This suite re-runs the same
 * operations in-process and compares the serialized results exactly.
 */

import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import {
  countingErrors,
  generateDensityMap,
  makeWindow,
  psnr,
  reconstruct,
  ssim,
  windowFromGrid,
} from "../src/index.js";
import { decodeDmap, decodeHeadsCsv, encodeDmap, encodeHeadsCsv } from "./helpers/codecs.js";

const GOLDEN = join(__dirname, "..", "golden");
const cases = readdirSync(GOLDEN).sort();

function sum64(data: Float32Array): number {
  let s = 0;
  const wide = new Float64Array(data.length);
  wide.set(data);
  for (const v of wide) s += v;
  return s;
}

describe.each(cases)("golden case %s", (name) => {
  const dir = join(GOLDEN, name);
  const meta = JSON.parse(readFileSync(join(dir, "meta.json"), "utf-8"));
  const metrics = JSON.parse(readFileSync(join(dir, "metrics.json"), "utf-8"));
  const win = windowFromGrid(decodeDmap(readFileSync(join(dir, "window.dmap"))));
  const coarse = decodeDmap(readFileSync(join(dir, "coarse.dmap")));

  it("generate matches the CLI byte for byte", () => {
    const points = decodeHeadsCsv(readFileSync(join(dir, "heads.csv"), "utf-8"));
    const dmap = generateDensityMap(points, meta.height, meta.width, win);
    const expected = readFileSync(join(dir, "expected_generate.dmap"));
    expect(encodeDmap(dmap).equals(expected)).toBe(true);
  });

  it("reconstruct matches the CLI byte for byte", () => {
    const result = reconstruct(coarse, win);
    const expectedHeads = readFileSync(join(dir, "expected_heads.csv"), "utf-8");
    expect(encodeHeadsCsv(result.points)).toBe(expectedHeads);
    const expectedPseudo = readFileSync(join(dir, "expected_pseudo.dmap"));
    expect(encodeDmap(result.pseudo).equals(expectedPseudo)).toBe(true);
    expect(result.count).toBe(metrics.count);
  });

  it("selection trace matches the CLI", () => {
    const result = reconstruct(coarse, win);
    const lines = readFileSync(join(dir, "expected_trace.jsonl"), "utf-8")
      .trim().split("\n").filter((l) => l.length > 0);
    const expected = lines.map((l) => JSON.parse(l));
    expect(result.trace.length).toBe(expected.length);
    result.trace.forEach((entry, i) => {
      expect(entry.j).toBe(expected[i].j);
      expect(entry.x).toBe(expected[i].x);
      expect(entry.y).toBe(expected[i].y);
      expect(Math.abs(entry.p - expected[i].p)).toBeLessThan(1e-12);
    });
  });

  it("metrics agree with the reference values", () => {
    const pseudo = decodeDmap(readFileSync(join(dir, "expected_pseudo.dmap")));
    const { mae, mse } = countingErrors([[sum64(coarse.data), sum64(pseudo.data)]]);
    expect(Math.abs(mae - metrics.mae)).toBeLessThan(1e-9);
    expect(Math.abs(mse - metrics.mse)).toBeLessThan(1e-9);
    const checkPsnr = (got: number, want: number | string) => {
      if (want === "inf") expect(got).toBe(Infinity);
      else expect(Math.abs(got - (want as number))).toBeLessThan(1e-9);
    };
    checkPsnr(psnr(pseudo, coarse), metrics.psnr_gt255);
    checkPsnr(psnr(pseudo, coarse, { normPolicy: "none" }), metrics.psnr_none);
    expect(Math.abs(ssim(pseudo, coarse) - metrics.ssim_gt255)).toBeLessThan(1e-6);
    expect(Math.abs(ssim(pseudo, coarse, { normPolicy: "none" }) - metrics.ssim_none))
      .toBeLessThan(1e-6);
  });

  it("the built-in window construction matches the shared grid", () => {
    const built = makeWindow(meta.k, meta.sigma).values;
    // the shared grid went through float32 storage; compare at that precision
    built.forEach((v, i) => {
      expect(Math.abs(v - win.values[i])).toBeLessThan(1e-6);
    });
  });
});
