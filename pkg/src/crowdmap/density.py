"""Gaussian windows, head lists and density-map stamping.

Conventions used everywhere in the package:

* rasters are 2-D ``float64`` arrays indexed ``[row, col]`` == ``[y, x]``;
* head positions are ``(x, y)`` integer pixel pairs, origin top-left;
* the Gaussian window has odd side ``k`` and is stamped centered on the
  head pixel, so it covers ``(k - 1) // 2`` pixels on each side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

DEFAULT_K = 15
DEFAULT_SIGMA = 4.0

BORDER_TRUNCATE = "truncate"
BORDER_RENORMALIZE = "renormalize"


@dataclass(frozen=True)
class GaussianWindow:
    """Discrete k-by-k Gaussian kernel used as the per-head prior.

    ``values[u, v] = exp(-d2 / (2 sigma^2))`` where ``d2`` is the squared
    distance of cell ``(u, v)`` to the window center.  When ``normalized``
    the entries are divided by their total so the window carries unit mass
    and a stamped map integrates to the head count; otherwise the center
    entry is exactly 1.
    """

    k: int
    sigma: float
    normalized: bool
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.shape != (self.k, self.k):
            raise InvalidArgumentError(
                f"window values must be {self.k}x{self.k}, got {self.values.shape}"
            )
        self.values.setflags(write=False)

    @property
    def half(self) -> int:
        return (self.k - 1) // 2

    @property
    def mass(self) -> float:
        return float(self.values.sum())


def make_window(k: int = DEFAULT_K, sigma: float = DEFAULT_SIGMA,
                normalized: bool = True) -> GaussianWindow:
    """Build the discrete Gaussian window.

    ``k`` must be a positive odd integer and ``sigma`` positive.  The
    unnormalized window peaks at exactly 1.0 in the center; the normalized
    window sums to 1 (within float64 rounding).
    """
    if not isinstance(k, (int, np.integer)) or k < 1 or k % 2 == 0:
        raise InvalidArgumentError(f"k must be a positive odd integer, got {k!r}")
    if not sigma > 0:
        raise InvalidArgumentError(f"sigma must be positive, got {sigma!r}")
    # 1-indexed cell coordinates; the center sits at (k + 1) / 2, which is
    # integral because k is odd, so the center distance is exactly 0.
    coords = np.arange(1, k + 1, dtype=np.float64)
    offsets = coords - (k + 1) / 2.0
    d2 = offsets[:, None] ** 2 + offsets[None, :] ** 2
    values = np.exp(-d2 / (2.0 * float(sigma) ** 2))
    if normalized:
        values = values / values.sum()
    return GaussianWindow(k=int(k), sigma=float(sigma), normalized=normalized,
                          values=values)


def window_values(window: GaussianWindow | np.ndarray) -> np.ndarray:
    """Accept either a GaussianWindow or a raw square kernel grid.

    Raw grids let callers reuse a kernel loaded from disk (e.g. a DMAP
    file written by the ``window`` CLI command) so that downstream results
    are reproducible bit for bit across tools.
    """
    if isinstance(window, GaussianWindow):
        return window.values
    values = np.ascontiguousarray(np.asarray(window, dtype=np.float64))
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise InvalidArgumentError(f"window grid must be square, got {values.shape}")
    if values.shape[0] % 2 == 0:
        raise InvalidArgumentError(f"window side must be odd, got {values.shape[0]}")
    return values


@dataclass(frozen=True)
class HeadList:
    """Ordered head annotations ``(x, y)`` on a height-by-width raster."""

    points: np.ndarray = field(repr=False)
    height: int
    width: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidArgumentError("points must be an (N, 2) array of (x, y) pairs")
        if self.height < 1 or self.width < 1:
            raise InvalidArgumentError(
                f"raster shape must be positive, got {self.height}x{self.width}"
            )
        if pts.size:
            x, y = pts[:, 0], pts[:, 1]
            if (x < 0).any() or (x >= self.width).any():
                raise InvalidArgumentError("head x out of range [0, width)")
            if (y < 0).any() or (y >= self.height).any():
                raise InvalidArgumentError("head y out of range [0, height)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def __iter__(self):
        return iter(map(tuple, self.points))

    @classmethod
    def from_pairs(cls, pairs, height: int, width: int) -> "HeadList":
        """Build from an iterable of (x, y) pairs; fractional coordinates
        are rounded half-up (annotations are pixel centers)."""
        pts = np.asarray(list(pairs), dtype=np.float64)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        return cls(points=np.floor(pts + 0.5).astype(np.int64),
                   height=height, width=width)


def _clipped_spans(x: int, y: int, k: int, height: int, width: int):
    """Raster and window index ranges for a window stamped at (x, y)."""
    half = (k - 1) // 2
    y0, y1 = max(0, y - half), min(height, y + half + 1)
    x0, x1 = max(0, x - half), min(width, x + half + 1)
    wy0, wx0 = y0 - (y - half), x0 - (x - half)
    wy1, wx1 = wy0 + (y1 - y0), wx0 + (x1 - x0)
    return (y0, y1, x0, x1), (wy0, wy1, wx0, wx1)


def generate_density_map(heads: HeadList, window: GaussianWindow | np.ndarray,
                         border: str = BORDER_TRUNCATE) -> np.ndarray:
    """Stamp one Gaussian window per head and sum them.

    ``border`` controls what happens when a window sticks out of the
    raster: ``truncate`` drops the out-of-frame mass, ``renormalize``
    rescales the clipped part so each head still contributes the full
    window mass (then the map total is exactly heads * window mass).
    Heads are stamped in list order, so output is deterministic.
    """
    if border not in (BORDER_TRUNCATE, BORDER_RENORMALIZE):
        raise InvalidArgumentError(f"unknown border policy {border!r}")
    win = window_values(window)
    k = win.shape[0]
    total = win.sum()
    out = np.zeros((heads.height, heads.width), dtype=np.float64)
    for x, y in heads.points:
        (y0, y1, x0, x1), (wy0, wy1, wx0, wx1) = _clipped_spans(
            int(x), int(y), k, heads.height, heads.width)
        block = win[wy0:wy1, wx0:wx1]
        if border == BORDER_RENORMALIZE:
            kept = block.sum()
            if kept != total:
                block = block * (total / kept)
        out[y0:y1, x0:x1] += block
    return out


def crop_window(values: np.ndarray, center: tuple[int, int], k: int) -> np.ndarray:
    """k-by-k neighborhood of ``center`` = (x, y), zero-padded at borders."""
    if k < 1 or k % 2 == 0:
        raise InvalidArgumentError(f"k must be a positive odd integer, got {k!r}")
    arr = np.asarray(values, dtype=np.float64)
    height, width = arr.shape
    x, y = int(center[0]), int(center[1])
    if not (0 <= x < width and 0 <= y < height):
        raise InvalidArgumentError(f"center {center} outside {height}x{width} raster")
    out = np.zeros((k, k), dtype=np.float64)
    (y0, y1, x0, x1), (wy0, wy1, wx0, wx1) = _clipped_spans(x, y, k, height, width)
    out[wy0:wy1, wx0:wx1] = arr[y0:y1, x0:x1]
    return out


def count_from_mass(total: float) -> int:
    """Head count implied by a map's mass: truncate toward zero, negative
    totals clamp to 0.

    A small snap absorbs rounding, so a map stamped from N unit-mass
    windows still counts as N even after a trip through 32-bit storage
    (which can leave the sum a few 1e-7 below the integer).  The relative
    term is far below the 1e-3 scale at which truncation is exercised.
    """
    return max(0, int(np.floor(total + 1e-6 * abs(total) + 1e-9)))
