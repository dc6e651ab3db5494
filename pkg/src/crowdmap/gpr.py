"""Greedy reconstruction of head locations from a coarse density map.

Every pixel gets a probability score ``P = 1 / (1 + L1(crop - window))``
measuring how closely its k-by-k neighborhood matches the Gaussian
window (1.0 means an exact kernel sitting there).  The reconstruction
loop then repeatedly takes the best-scoring pixel, subtracts one window
from a working copy of the map, and rescores only the neighborhood that
changed.  Stamping the selected points back out yields a standardized
pseudo-label map.

Two modes produce identical head sequences:

* ``naive``       rescores the whole map after every subtraction - the
                  obvious (slow) formulation, kept as an oracle;
* ``incremental`` rescores only the affected (2k-1)-sided block and
                  tracks the running argmax with a per-block max index,
                  making per-head cost independent of raster size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import get_backend
from .density import (
    BORDER_TRUNCATE,
    GaussianWindow,
    HeadList,
    _clipped_spans,
    count_from_mass,
    generate_density_map,
    window_values,
)
from .errors import InvalidArgumentError

MODE_INCREMENTAL = "incremental"
MODE_NAIVE = "naive"


@dataclass(frozen=True)
class ReconstructionResult:
    """Extracted heads, the pseudo-label map stamped from them, and the
    selection trace ``[((x, y), probability at selection), ...]``."""

    heads: HeadList
    pseudo_map: np.ndarray = field(repr=False)
    count: int
    trace: list[tuple[tuple[int, int], float]] = field(repr=False)


def _as_map(values) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidArgumentError(f"expected a nonempty 2-D map, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidArgumentError("map contains NaN or infinite values")
    return arr


def _check_window_fits(k: int, height: int, width: int):
    if k > min(height, width):
        raise InvalidArgumentError(
            f"window side {k} exceeds raster {height}x{width}"
        )


def _padded_copy(arr: np.ndarray, k: int) -> np.ndarray:
    """Working copy with a zero margin of (k-1)/2 so border crops read
    zeros.  The margin is never written: subtraction only touches the
    in-raster part of a stamp."""
    half = (k - 1) // 2
    height, width = arr.shape
    padded = np.zeros((height + k - 1, width + k - 1), dtype=np.float64)
    padded[half:half + height, half:half + width] = arr
    return padded


def probability_map(coarse, window: GaussianWindow | np.ndarray,
                    backend: str | None = None) -> np.ndarray:
    """Per-pixel similarity of the map to the Gaussian window.

    Returns values in (0, 1]; an all-zero map scores 1 / (1 + window mass)
    everywhere, an exact interior kernel scores 1.0 at its center.
    """
    arr = _as_map(coarse)
    win = window_values(window)
    height, width = arr.shape
    _check_window_fits(win.shape[0], height, width)
    padded = _padded_copy(arr, win.shape[0])
    out = np.empty((height, width), dtype=np.float64)
    get_backend(backend).compute_probability(padded, win, out, 0, height, 0, width)
    return out


def select_candidate(prob: np.ndarray) -> tuple[int, int]:
    """Position (x, y) of the maximum; ties break to the smallest row,
    then the smallest column."""
    arr = np.asarray(prob)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidArgumentError("probability map must be a nonempty 2-D array")
    y, x = divmod(int(arr.argmax()), arr.shape[1])
    return x, y


def _refresh_bounds(x: int, y: int, k: int, height: int, width: int):
    """Clipped (2k-1)-sided block of pixels whose crop can overlap a
    window modified at (x, y)."""
    return (max(0, y - (k - 1)), min(height, y + k),
            max(0, x - (k - 1)), min(width, x + k))


def refresh_region(prob: np.ndarray, coarse, window: GaussianWindow | np.ndarray,
                   center: tuple[int, int], backend: str | None = None) -> np.ndarray:
    """Recompute ``prob`` in place over the block affected by a window
    modification at ``center``; pixels outside the block are untouched."""
    arr = _as_map(coarse)
    win = window_values(window)
    height, width = arr.shape
    if prob.shape != arr.shape:
        raise InvalidArgumentError(
            f"probability map shape {prob.shape} != map shape {arr.shape}")
    x, y = int(center[0]), int(center[1])
    if not (0 <= x < width and 0 <= y < height):
        raise InvalidArgumentError(f"center {center} outside {height}x{width} raster")
    padded = _padded_copy(arr, win.shape[0])
    y0, y1, x0, x1 = _refresh_bounds(x, y, win.shape[0], height, width)
    get_backend(backend).compute_probability(padded, win, prob, y0, y1, x0, x1)
    return prob


class _BlockIndex:
    """Two-level max index over k-by-k tiles of the probability map.

    Each tile stores its max value and the row-major key of the first
    pixel attaining it; groups of k-by-k tiles are summarized the same
    way.  For any such partition the globally first (row-major) maximum
    is the smallest stored key among groups holding the global max, so
    an argmax costs a scan of the tiny top level while an update after a
    window subtraction touches a handful of tiles.  Assumes strictly
    positive map values (probabilities).
    """

    def __init__(self, prob: np.ndarray, block: int):
        self.block = block
        self.height, self.width = prob.shape
        nby = -(-self.height // block)
        nbx = -(-self.width // block)
        padded = np.full((nby * block, nbx * block), -1.0)
        padded[:self.height, :self.width] = prob
        tiles = (padded.reshape(nby, block, nbx, block)
                 .transpose(0, 2, 1, 3).reshape(nby, nbx, block * block))
        flat = tiles.argmax(axis=2)  # first in-tile occurrence == min key
        self.bmax = np.take_along_axis(tiles, flat[:, :, None], axis=2)[:, :, 0]
        dy, dx = np.divmod(flat, block)
        ys = np.arange(nby, dtype=np.int64)[:, None] * block + dy
        xs = np.arange(nbx, dtype=np.int64)[None, :] * block + dx
        self.bkey = ys * self.width + xs
        nsy = -(-nby // block)
        nsx = -(-nbx // block)
        self.smax = np.empty((nsy, nsx), dtype=np.float64)
        self.skey = np.empty((nsy, nsx), dtype=np.int64)
        self._reduce_groups(0, nby, 0, nbx)

    def _reduce_groups(self, by0: int, by1: int, bx0: int, bx1: int):
        b = self.block
        nby, nbx = self.bmax.shape
        for sy in range(by0 // b, (by1 - 1) // b + 1):
            ys, ye = sy * b, min((sy + 1) * b, nby)
            for sx in range(bx0 // b, (bx1 - 1) // b + 1):
                xs, xe = sx * b, min((sx + 1) * b, nbx)
                vals = self.bmax[ys:ye, xs:xe]
                best = vals.max()
                self.smax[sy, sx] = best
                self.skey[sy, sx] = self.bkey[ys:ye, xs:xe][vals == best].min()

    def update(self, prob: np.ndarray, y0: int, y1: int, x0: int, x1: int):
        b = self.block
        by0, by1 = y0 // b, (y1 - 1) // b + 1
        bx0, bx1 = x0 // b, (x1 - 1) // b + 1
        for by in range(by0, by1):
            ys = by * b
            ye = min(ys + b, self.height)
            for bx in range(bx0, bx1):
                xs = bx * b
                xe = min(xs + b, self.width)
                tile = prob[ys:ye, xs:xe]
                dy, dx = divmod(int(tile.argmax()), xe - xs)
                self.bmax[by, bx] = tile[dy, dx]
                self.bkey[by, bx] = (ys + dy) * self.width + (xs + dx)
        self._reduce_groups(by0, by1, bx0, bx1)

    def argmax(self) -> tuple[int, int]:
        best = self.smax.max()
        key = int(self.skey[self.smax == best].min())
        return divmod(key, self.width)  # (y, x)


def _init_state(arr: np.ndarray, win: np.ndarray, mode: str, backend: str | None):
    """One-time setup for the greedy loop: padded working copy, the full
    probability map, and (in incremental mode) the max index.  Split out
    so benchmarks can separate O(H*W) initialization from per-head work."""
    kernel = get_backend(backend)
    k = win.shape[0]
    height, width = arr.shape
    padded = _padded_copy(arr, k)
    prob = np.empty((height, width), dtype=np.float64)
    kernel.compute_probability(padded, win, prob, 0, height, 0, width)
    index = _BlockIndex(prob, k) if mode == MODE_INCREMENTAL else None
    return kernel, padded, prob, index


def reconstruct(coarse, window: GaussianWindow | np.ndarray,
                count_override: int | None = None,
                mode: str = MODE_INCREMENTAL,
                backend: str | None = None) -> ReconstructionResult:
    """Run the full pick-subtract-rescore loop on a working copy.

    The head count is ``count_override`` when given, otherwise the map
    mass truncated toward zero (negative mass counts as 0).  The input
    map is never modified; subtraction may drive the working copy
    negative, which is left as is.
    """
    arr = _as_map(coarse)
    win = window_values(window)
    k = win.shape[0]
    height, width = arr.shape
    _check_window_fits(k, height, width)
    if mode not in (MODE_INCREMENTAL, MODE_NAIVE):
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    if count_override is None:
        count = count_from_mass(arr.sum())
    else:
        count = int(count_override)
        if count < 0:
            raise InvalidArgumentError("count_override must be non-negative")
        if count > height * width:
            raise InvalidArgumentError(
                f"count_override {count} exceeds pixel count {height * width}")

    kernel, padded, prob, index = _init_state(arr, win, mode, backend)
    half = (k - 1) // 2
    working = padded[half:half + height, half:half + width]

    points = np.zeros((count, 2), dtype=np.int64)
    trace: list[tuple[tuple[int, int], float]] = []
    for j in range(count):
        if index is not None:
            y, x = index.argmax()
        else:
            y, x = divmod(int(prob.argmax()), width)
        points[j, 0] = x
        points[j, 1] = y
        trace.append(((x, y), float(prob[y, x])))
        (y0, y1, x0, x1), (wy0, wy1, wx0, wx1) = _clipped_spans(
            x, y, k, height, width)
        working[y0:y1, x0:x1] -= win[wy0:wy1, wx0:wx1]
        if index is not None:
            ry0, ry1, rx0, rx1 = _refresh_bounds(x, y, k, height, width)
            kernel.compute_probability(padded, win, prob, ry0, ry1, rx0, rx1)
            index.update(prob, ry0, ry1, rx0, rx1)
        else:
            kernel.compute_probability(padded, win, prob, 0, height, 0, width)

    heads = HeadList(points=points, height=height, width=width)
    pseudo = generate_density_map(heads, win, BORDER_TRUNCATE)
    return ReconstructionResult(heads=heads, pseudo_map=pseudo,
                                count=count, trace=trace)
