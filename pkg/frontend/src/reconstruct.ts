/** Greedy head extraction from a coarse density map.
 *
 * Scores every pixel by 1 / (1 + L1(local crop - window)), then
 * repeatedly takes the best pixel, subtracts one window from a working
 * copy, and rescores the neighborhood that changed.  The numerics run in
 * float64 with a fixed accumulation order (window cells row-major), the
 * same order the reference pipeline uses, so identical inputs give
 * identical outputs bit for bit.
 */

import { assertFiniteMap, Grid, sumSequential, toFloat64 } from "./grid.js";
import { countFromMass, Point, stampFloat64 } from "./density.js";
import { KernelWindow } from "./window.js";

export interface TraceEntry {
  j: number;
  x: number;
  y: number;
  /** probability at the moment of selection */
  p: number;
}

export interface ReconstructionResult {
  points: Point[];
  /** standardized pseudo-label map stamped from the points */
  pseudo: Grid;
  count: number;
  trace: TraceEntry[];
}

export interface ReconstructOptions {
  countOverride?: number;
}

function checkWindowFits(k: number, height: number, width: number): void {
  if (k > Math.min(height, width)) {
    throw new Error(`window side ${k} exceeds raster ${height}x${width}`);
  }
}

function computeProbability(
  padded: Float64Array, paddedWidth: number,
  win: Float64Array, k: number,
  out: Float64Array, width: number,
  y0: number, y1: number, x0: number, x1: number,
): void {
  for (let i = y0; i < y1; i++) {
    for (let j = x0; j < x1; j++) {
      let s = 0.0;
      for (let a = 0; a < k; a++) {
        const prow = (i + a) * paddedWidth + j;
        const wrow = a * k;
        for (let b = 0; b < k; b++) {
          s += Math.abs(padded[prow + b] - win[wrow + b]);
        }
      }
      out[i * width + j] = 1.0 / (1.0 + s);
    }
  }
}

/** Per-pixel window-similarity scores in (0, 1], as float64. */
export function probabilityMap(coarse: Grid, win: KernelWindow): Float64Array {
  const { height, width } = coarse;
  checkWindowFits(win.k, height, width);
  const values = toFloat64(coarse);
  assertFiniteMap(values, "map");
  const half = (win.k - 1) >> 1;
  const paddedWidth = width + win.k - 1;
  const padded = new Float64Array((height + win.k - 1) * paddedWidth);
  for (let y = 0; y < height; y++) {
    padded.set(values.subarray(y * width, (y + 1) * width),
               (y + half) * paddedWidth + half);
  }
  const prob = new Float64Array(height * width);
  computeProbability(padded, paddedWidth, win.values, win.k, prob, width,
                     0, height, 0, width);
  return prob;
}

function argmaxRowMajor(prob: Float64Array): number {
  let best = -Infinity;
  let bestIdx = 0;
  for (let i = 0; i < prob.length; i++) {
    if (prob[i] > best) { // strict: ties keep the first (row-major) pixel
      best = prob[i];
      bestIdx = i;
    }
  }
  return bestIdx;
}

/** Run the full pick-subtract-rescore loop; the input is not modified. */
export function reconstruct(
  coarse: Grid,
  win: KernelWindow,
  options: ReconstructOptions = {},
): ReconstructionResult {
  const { height, width } = coarse;
  const k = win.k;
  checkWindowFits(k, height, width);
  const values = toFloat64(coarse);
  assertFiniteMap(values, "map");

  let count: number;
  if (options.countOverride === undefined) {
    count = countFromMass(sumSequential(values));
  } else {
    count = options.countOverride;
    if (!Number.isInteger(count) || count < 0) {
      throw new Error("count override must be a non-negative integer");
    }
    if (count > height * width) {
      throw new Error(`count_override ${count} exceeds pixel count ${height * width}`);
    }
  }

  const half = (k - 1) >> 1;
  const paddedWidth = width + k - 1;
  const padded = new Float64Array((height + k - 1) * paddedWidth);
  for (let y = 0; y < height; y++) {
    padded.set(values.subarray(y * width, (y + 1) * width),
               (y + half) * paddedWidth + half);
  }
  const prob = new Float64Array(height * width);
  computeProbability(padded, paddedWidth, win.values, k, prob, width,
                     0, height, 0, width);

  const points: Point[] = [];
  const trace: TraceEntry[] = [];
  for (let j = 0; j < count; j++) {
    const idx = argmaxRowMajor(prob);
    const y = Math.floor(idx / width);
    const x = idx % width;
    points.push([x, y]);
    trace.push({ j, x, y, p: prob[idx] });
    // subtract the clipped window from the working copy
    const sy0 = Math.max(0, y - half);
    const sy1 = Math.min(height, y + half + 1);
    const sx0 = Math.max(0, x - half);
    const sx1 = Math.min(width, x + half + 1);
    for (let yy = sy0; yy < sy1; yy++) {
      const wrow = (yy - (y - half)) * k - (x - half);
      const prow = (yy + half) * paddedWidth + half;
      for (let xx = sx0; xx < sx1; xx++) {
        padded[prow + xx] -= win.values[wrow + xx];
      }
    }
    // rescore every pixel whose crop can overlap the change
    computeProbability(padded, paddedWidth, win.values, k, prob, width,
                       Math.max(0, y - (k - 1)), Math.min(height, y + k),
                       Math.max(0, x - (k - 1)), Math.min(width, x + k));
  }

  const stamped = stampFloat64(points, height, width, win, "truncate");
  const data = new Float32Array(stamped.length);
  data.set(stamped);
  return { points, pseudo: { data, height, width }, count, trace };
}
