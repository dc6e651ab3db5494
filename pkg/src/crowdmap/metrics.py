"""Counting-error metrics, map-quality metrics and adversarial loss
formulas, all as pure forward functions over supplied grids.

Counting MAE/MSE follow the crowd-counting convention: MAE is the mean
absolute count error and "MSE" is the root of the mean squared error.
PSNR/SSIM operate on density maps whose dynamic range is tiny, so a
normalization policy is applied first (default: scale both maps by
255 / max(ground truth)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import InvalidArgumentError

NORM_GT_MAX_255 = "gt_max_255"
NORM_NONE = "none"


@dataclass(frozen=True)
class LossWeights:
    """Weights of the three adversarial terms in the total objective."""

    alpha: float = 0.01
    beta: float = 0.1
    gamma: float = 0.1

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidArgumentError(f"{name} must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class QualityParams:
    """PSNR/SSIM parameterization (dynamic range, SSIM window)."""

    dynamic_range: float = 255.0
    ssim_window: int = 11
    ssim_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03

    def __post_init__(self):
        if self.dynamic_range <= 0 or self.ssim_sigma <= 0:
            raise InvalidArgumentError("dynamic range and ssim sigma must be positive")
        if self.ssim_window < 1 or self.ssim_window % 2 == 0:
            raise InvalidArgumentError("ssim window side must be a positive odd integer")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


def _grid(values, name="grid") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidArgumentError(f"{name} must be a nonempty 2-D array")
    if not np.isfinite(arr).all():
        raise InvalidArgumentError(f"{name} contains NaN or infinite values")
    return arr


def _paired_grids(a, b):
    ga, gb = _grid(a, "first map"), _grid(b, "second map")
    if ga.shape != gb.shape:
        raise InvalidArgumentError(f"shape mismatch: {ga.shape} vs {gb.shape}")
    return ga, gb


def counting_errors(pairs) -> tuple[float, float]:
    """(MAE, MSE) over per-image (truth, prediction) count pairs.

    MSE here is the root-mean-square count error, so MSE >= MAE always.
    """
    arr = np.asarray(list(pairs), dtype=np.float64)
    if arr.size == 0:
        raise InvalidArgumentError("need at least one (truth, prediction) pair")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidArgumentError("pairs must be (truth, prediction) tuples")
    err = np.abs(arr[:, 0] - arr[:, 1])
    return float(err.mean()), float(np.sqrt((err ** 2).mean()))


def pixel_mse(a, b) -> float:
    """Mean squared elementwise difference of two equal-shape maps."""
    ga, gb = _paired_grids(a, b)
    return float(np.mean((ga - gb) ** 2))


def _apply_norm(pred: np.ndarray, gt: np.ndarray, norm_policy: str):
    if norm_policy == NORM_NONE:
        return pred, gt
    if norm_policy == NORM_GT_MAX_255:
        peak = gt.max()
        if peak > 0:
            scale = 255.0 / peak
            return pred * scale, gt * scale
        return pred, gt
    raise InvalidArgumentError(f"unknown normalization policy {norm_policy!r}")


def psnr(pred, gt, params: QualityParams = QualityParams(),
         norm_policy: str = NORM_GT_MAX_255) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical maps."""
    gp, gg = _paired_grids(pred, gt)
    gp, gg = _apply_norm(gp, gg, norm_policy)
    mse = np.mean((gp - gg) ** 2)
    if mse == 0.0:
        return math.inf
    return float(10.0 * np.log10(params.dynamic_range ** 2 / mse))


def _ssim_filter(arr: np.ndarray, taps: np.ndarray, margin: int) -> np.ndarray:
    # Separable Gaussian correlation; the margin slice keeps only windows
    # fully inside the map, so the padding mode never matters.
    out = correlate1d(arr, taps, axis=0, mode="constant")
    out = correlate1d(out, taps, axis=1, mode="constant")
    return out[margin:arr.shape[0] - margin, margin:arr.shape[1] - margin]


def ssim(pred, gt, params: QualityParams = QualityParams(),
         norm_policy: str = NORM_GT_MAX_255) -> float:
    """Mean structural similarity with a Gaussian-weighted sliding window.

    Windows are evaluated only where they fit entirely inside the maps;
    statistics use the weighted-moment form (no sample-size correction).
    """
    gp, gg = _paired_grids(pred, gt)
    side = params.ssim_window
    if min(gp.shape) < side:
        raise InvalidArgumentError(
            f"maps of shape {gp.shape} are smaller than the {side}x{side} ssim window")
    gp, gg = _apply_norm(gp, gg, norm_policy)

    offsets = np.arange(side, dtype=np.float64) - (side - 1) / 2.0
    taps = np.exp(-(offsets ** 2) / (2.0 * params.ssim_sigma ** 2))
    taps /= taps.sum()
    margin = (side - 1) // 2

    mu_x = _ssim_filter(gp, taps, margin)
    mu_y = _ssim_filter(gg, taps, margin)
    var_x = _ssim_filter(gp * gp, taps, margin) - mu_x * mu_x
    var_y = _ssim_filter(gg * gg, taps, margin) - mu_y * mu_y
    cov = _ssim_filter(gp * gg, taps, margin) - mu_x * mu_y

    c1, c2 = params.c1, params.c2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def lsgan_disc_loss(scores_a, scores_b, label_a: float, label_b: float) -> float:
    """Least-squares discriminator loss over two score maps:
    mean((a - label_a)^2) / 2 + mean((b - label_b)^2) / 2."""
    ga = _grid(scores_a, "scores_a")
    gb = _grid(scores_b, "scores_b")
    return float(0.5 * np.mean((ga - label_a) ** 2)
                 + 0.5 * np.mean((gb - label_b) ** 2))


def lsgan_gen_loss(scores, target_label: float) -> float:
    """Least-squares generator-side loss: mean((scores - target)^2) / 2."""
    g = _grid(scores, "scores")
    return float(0.5 * np.mean((g - target_label) ** 2))


def _two_scales(per_scale, name):
    items = list(per_scale)
    if len(items) != 2:
        raise InvalidArgumentError(f"{name} expects exactly 2 scales, got {len(items)}")
    return items


def multiscale_disc_loss(scores_a, scores_b, label_a: float, label_b: float) -> float:
    """Two-scale discriminator loss: the per-scale squared-error terms are
    summed over both scales with a single 1/2 prefactor outside the sum."""
    sa = _two_scales(scores_a, "scores_a")
    sb = _two_scales(scores_b, "scores_b")
    total = 0.0
    for a, b in zip(sa, sb):
        ga = _grid(a, "scores_a")
        gb = _grid(b, "scores_b")
        total += np.mean((ga - label_a) ** 2) + np.mean((gb - label_b) ** 2)
    return float(0.5 * total)


def multiscale_gen_loss(scores, target_label: float) -> float:
    """Two-scale generator-side loss: 1/2 of the summed per-scale means."""
    items = _two_scales(scores, "scores")
    total = 0.0
    for s in items:
        total += np.mean((_grid(s, "scores") - target_label) ** 2)
    return float(0.5 * total)


def reconstruction_loss(a, b) -> float:
    """Pixel-wise consistency loss between a reconstruction and its
    source; same formula as :func:`pixel_mse`, named for its role."""
    return pixel_mse(a, b)


def content_loss(features_a, features_b) -> float:
    """Mean over feature layers of the per-layer MSE (perceptual-style
    consistency over pre-extracted feature grids)."""
    la, lb = list(features_a), list(features_b)
    if len(la) != len(lb):
        raise InvalidArgumentError(
            f"feature lists differ in length: {len(la)} vs {len(lb)}")
    if not la:
        raise InvalidArgumentError("feature lists must be nonempty")
    return float(np.mean([pixel_mse(a, b) for a, b in zip(la, lb)]))


def total_objective(task: float, adv_c: float, adv_to_s: float, adv_to_t: float,
                    cons: float, weights: LossWeights = LossWeights()) -> float:
    """Weighted training objective: task + a*adv_c + b*adv_toS + g*adv_toT + cons."""
    parts = (task, adv_c, adv_to_s, adv_to_t, cons)
    if not all(math.isfinite(p) for p in parts):
        raise InvalidArgumentError("loss terms must be finite")
    return float(task + weights.alpha * adv_c + weights.beta * adv_to_s
                 + weights.gamma * adv_to_t + cons)
