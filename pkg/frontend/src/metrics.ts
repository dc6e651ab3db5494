/** Counting-error and map-quality metrics. */

import { assertSameShape, Grid, toFloat64 } from "./grid.js";

export type NormPolicy = "gt_max_255" | "none";

export interface QualityOptions {
  dynamicRange?: number; // default 255
  normPolicy?: NormPolicy; // default "gt_max_255"
  ssimWindow?: number; // default 11
  ssimSigma?: number; // default 1.5
  k1?: number; // default 0.01
  k2?: number; // default 0.03
}

export interface CountingErrors {
  /** mean absolute count error */
  mae: number;
  /** root-mean-square count error (so mse >= mae) */
  mse: number;
}

export function countingErrors(
  pairs: ReadonlyArray<readonly [number, number]>,
): CountingErrors {
  if (pairs.length === 0) {
    throw new Error("need at least one (truth, prediction) pair");
  }
  let absSum = 0;
  let sqSum = 0;
  for (const [truth, prediction] of pairs) {
    const err = Math.abs(truth - prediction);
    absSum += err;
    sqSum += err * err;
  }
  return { mae: absSum / pairs.length, mse: Math.sqrt(sqSum / pairs.length) };
}

function applyNorm(
  pred: Float64Array, gt: Float64Array, policy: NormPolicy,
): [Float64Array, Float64Array] {
  if (policy === "none") return [pred, gt];
  if (policy !== "gt_max_255") throw new Error(`unknown normalization policy '${policy}'`);
  let peak = -Infinity;
  for (let i = 0; i < gt.length; i++) if (gt[i] > peak) peak = gt[i];
  if (!(peak > 0)) return [pred, gt];
  const scale = 255.0 / peak;
  const p = new Float64Array(pred.length);
  const g = new Float64Array(gt.length);
  for (let i = 0; i < pred.length; i++) {
    p[i] = pred[i] * scale;
    g[i] = gt[i] * scale;
  }
  return [p, g];
}

/** Peak signal-to-noise ratio in dB; Infinity for identical maps. */
export function psnr(pred: Grid, gt: Grid, options: QualityOptions = {}): number {
  assertSameShape(pred, gt);
  const dynamicRange = options.dynamicRange ?? 255.0;
  const [p, g] = applyNorm(toFloat64(pred), toFloat64(gt),
                           options.normPolicy ?? "gt_max_255");
  let sq = 0;
  for (let i = 0; i < p.length; i++) {
    const d = p[i] - g[i];
    sq += d * d;
  }
  const mse = sq / p.length;
  if (mse === 0) return Infinity;
  return 10.0 * Math.log10((dynamicRange * dynamicRange) / mse);
}

/** One vertical + one horizontal Gaussian pass, keeping only windows
 * that fit entirely inside the raster. */
function validGaussianFilter(
  a: Float64Array, height: number, width: number, taps: Float64Array,
): Float64Array {
  const side = taps.length;
  const outH = height - side + 1;
  const outW = width - side + 1;
  const tmp = new Float64Array(outH * width);
  for (let i = 0; i < outH; i++) {
    for (let j = 0; j < width; j++) {
      let s = 0;
      for (let d = 0; d < side; d++) s += taps[d] * a[(i + d) * width + j];
      tmp[i * width + j] = s;
    }
  }
  const out = new Float64Array(outH * outW);
  for (let i = 0; i < outH; i++) {
    for (let j = 0; j < outW; j++) {
      let s = 0;
      for (let d = 0; d < side; d++) s += taps[d] * tmp[i * width + j + d];
      out[i * outW + j] = s;
    }
  }
  return out;
}

/**
 * Mean structural similarity with a Gaussian-weighted sliding window
 * (weighted-moment statistics, no sample-size correction).
 */
export function ssim(pred: Grid, gt: Grid, options: QualityOptions = {}): number {
  assertSameShape(pred, gt);
  const side = options.ssimWindow ?? 11;
  const sigma = options.ssimSigma ?? 1.5;
  const dynamicRange = options.dynamicRange ?? 255.0;
  const k1 = options.k1 ?? 0.01;
  const k2 = options.k2 ?? 0.03;
  if (!Number.isInteger(side) || side < 1 || side % 2 === 0) {
    throw new Error("ssim window side must be a positive odd integer");
  }
  if (Math.min(pred.height, pred.width) < side) {
    throw new Error(
      `maps of shape (${pred.height}, ${pred.width}) are smaller than the ` +
      `${side}x${side} ssim window`);
  }
  const [p, g] = applyNorm(toFloat64(pred), toFloat64(gt),
                           options.normPolicy ?? "gt_max_255");
  const taps = new Float64Array(side);
  let tapSum = 0;
  for (let i = 0; i < side; i++) {
    const off = i - (side - 1) / 2;
    taps[i] = Math.exp(-(off * off) / (2 * sigma * sigma));
    tapSum += taps[i];
  }
  for (let i = 0; i < side; i++) taps[i] /= tapSum;

  const { height, width } = pred;
  const pp = new Float64Array(p.length);
  const gg = new Float64Array(g.length);
  const pg = new Float64Array(p.length);
  for (let i = 0; i < p.length; i++) {
    pp[i] = p[i] * p[i];
    gg[i] = g[i] * g[i];
    pg[i] = p[i] * g[i];
  }
  const muX = validGaussianFilter(p, height, width, taps);
  const muY = validGaussianFilter(g, height, width, taps);
  const exx = validGaussianFilter(pp, height, width, taps);
  const eyy = validGaussianFilter(gg, height, width, taps);
  const exy = validGaussianFilter(pg, height, width, taps);

  const c1 = (k1 * dynamicRange) ** 2;
  const c2 = (k2 * dynamicRange) ** 2;
  let total = 0;
  for (let i = 0; i < muX.length; i++) {
    const mx = muX[i];
    const my = muY[i];
    const vx = exx[i] - mx * mx;
    const vy = eyy[i] - my * my;
    const cov = exy[i] - mx * my;
    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
           / ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / muX.length;
}
