/** Row-major raster views exchanged with callers. */

export interface Grid {
  /** Contiguous row-major samples, length === height * width. */
  data: Float32Array;
  height: number;
  width: number;
}

export function grid(data: Float32Array, height: number, width: number): Grid {
  if (!Number.isInteger(height) || !Number.isInteger(width) || height < 1 || width < 1) {
    throw new Error(`raster shape must be positive, got ${height}x${width}`);
  }
  if (data.length !== height * width) {
    throw new Error(`buffer length ${data.length} != ${height}*${width}`);
  }
  return { data, height, width };
}

/** Widen to float64 for computation; the caller keeps the input buffer. */
export function toFloat64(g: Grid): Float64Array {
  const out = new Float64Array(g.data.length);
  out.set(g.data);
  return out;
}

export function assertFiniteMap(values: Float64Array, what: string): void {
  for (let i = 0; i < values.length; i++) {
    if (!Number.isFinite(values[i])) {
      throw new Error(`${what} contains NaN or infinite values`);
    }
  }
}

export function assertSameShape(a: Grid, b: Grid): void {
  if (a.height !== b.height || a.width !== b.width) {
    throw new Error(
      `shape mismatch: (${a.height}, ${a.width}) vs (${b.height}, ${b.width})`);
  }
}

/** Sequential row-major sum (the canonical reduction order here). */
export function sumSequential(values: Float64Array): number {
  let s = 0;
  for (let i = 0; i < values.length; i++) s += values[i];
  return s;
}
