export { Grid, grid, toFloat64 } from "./grid.js";
export {
  DEFAULT_K,
  DEFAULT_SIGMA,
  KernelWindow,
  makeWindow,
  windowFromGrid,
} from "./window.js";
export {
  BorderPolicy,
  Point,
  countFromMass,
  generateDensityMap,
} from "./density.js";
export {
  ReconstructOptions,
  ReconstructionResult,
  TraceEntry,
  probabilityMap,
  reconstruct,
} from "./reconstruct.js";
export {
  CountingErrors,
  NormPolicy,
  QualityOptions,
  countingErrors,
  psnr,
  ssim,
} from "./metrics.js";
