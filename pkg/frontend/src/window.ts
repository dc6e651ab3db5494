/** The discrete Gaussian window stamped per head. */

import { Grid, sumSequential } from "./grid.js";

export interface KernelWindow {
  k: number;
  /** k*k row-major float64 values. */
  values: Float64Array;
}

export const DEFAULT_K = 15;
export const DEFAULT_SIGMA = 4.0;

/**
 * Build the window: value = exp(-d^2 / (2 sigma^2)) with d the distance
 * to the center cell.  Normalized windows carry unit mass; otherwise the
 * center is exactly 1.
 */
export function makeWindow(
  k: number = DEFAULT_K,
  sigma: number = DEFAULT_SIGMA,
  normalized = true,
): KernelWindow {
  if (!Number.isInteger(k) || k < 1 || k % 2 === 0) {
    throw new Error(`k must be a positive odd integer, got ${k}`);
  }
  if (!(sigma > 0)) {
    throw new Error(`sigma must be positive, got ${sigma}`);
  }
  const values = new Float64Array(k * k);
  const center = (k + 1) / 2;
  for (let u = 1; u <= k; u++) {
    for (let v = 1; v <= k; v++) {
      const d2 = (u - center) ** 2 + (v - center) ** 2;
      values[(u - 1) * k + (v - 1)] = Math.exp(-d2 / (2.0 * sigma * sigma));
    }
  }
  if (normalized) {
    const total = sumSequential(values);
    for (let i = 0; i < values.length; i++) values[i] /= total;
  }
  return { k, values };
}

/**
 * Treat a square raster (for example a window emitted to a DMAP file) as
 * the kernel.  Reusing one shared grid keeps results reproducible bit
 * for bit across tools and languages.
 */
export function windowFromGrid(g: Grid): KernelWindow {
  if (g.height !== g.width) {
    throw new Error(`window grid must be square, got (${g.height}, ${g.width})`);
  }
  if (g.height % 2 === 0) {
    throw new Error(`window side must be odd, got ${g.height}`);
  }
  const values = new Float64Array(g.data.length);
  values.set(g.data);
  return { k: g.height, values };
}
