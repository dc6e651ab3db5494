/** Stamping head lists into density maps. */

import { Grid } from "./grid.js";
import { KernelWindow } from "./window.js";

export type BorderPolicy = "truncate" | "renormalize";

export type Point = readonly [number, number]; // (x, y), origin top-left

export function validatePoints(points: readonly Point[], height: number, width: number): void {
  for (const [x, y] of points) {
    if (!Number.isInteger(x) || !Number.isInteger(y)) {
      throw new Error(`head coordinates must be integers, got (${x}, ${y})`);
    }
    if (x < 0 || x >= width) throw new Error("head x out of range [0, width)");
    if (y < 0 || y >= height) throw new Error("head y out of range [0, height)");
  }
}

/**
 * Sum one window per head into a float64 raster, in head order.  Matches
 * the stamping used to build pseudo labels, so reconstruction callers
 * reuse it.
 */
export function stampFloat64(
  points: readonly Point[],
  height: number,
  width: number,
  win: KernelWindow,
  border: BorderPolicy,
): Float64Array {
  const k = win.k;
  const half = (k - 1) >> 1;
  const out = new Float64Array(height * width);
  let total = 0;
  for (let i = 0; i < win.values.length; i++) total += win.values[i];
  for (const [x, y] of points) {
    const y0 = Math.max(0, y - half);
    const y1 = Math.min(height, y + half + 1);
    const x0 = Math.max(0, x - half);
    const x1 = Math.min(width, x + half + 1);
    let scale = 1.0;
    if (border === "renormalize") {
      let kept = 0;
      for (let yy = y0; yy < y1; yy++) {
        const wrow = (yy - (y - half)) * k - (x - half);
        for (let xx = x0; xx < x1; xx++) kept += win.values[wrow + xx];
      }
      if (kept !== total) scale = total / kept;
    }
    for (let yy = y0; yy < y1; yy++) {
      const wrow = (yy - (y - half)) * k - (x - half);
      const orow = yy * width;
      for (let xx = x0; xx < x1; xx++) {
        out[orow + xx] += scale === 1.0 ? win.values[wrow + xx]
                                        : win.values[wrow + xx] * scale;
      }
    }
  }
  return out;
}

/** Stamp heads into a new float32 density map. */
export function generateDensityMap(
  points: readonly Point[],
  height: number,
  width: number,
  win: KernelWindow,
  border: BorderPolicy = "truncate",
): Grid {
  if (height < 1 || width < 1) {
    throw new Error(`raster shape must be positive, got ${height}x${width}`);
  }
  if (border !== "truncate" && border !== "renormalize") {
    throw new Error(`unknown border policy '${border}'`);
  }
  validatePoints(points, height, width);
  const stamped = stampFloat64(points, height, width, win, border);
  const data = new Float32Array(stamped.length);
  data.set(stamped); // IEEE round-to-nearest on narrowing
  return { data, height, width };
}

/**
 * Head count implied by a map's mass: truncate toward zero with a small
 * snap for float rounding; negative totals count as 0.
 */
export function countFromMass(total: number): number {
  return Math.max(0, Math.floor(total + 1e-6 * Math.abs(total) + 1e-9));
}
