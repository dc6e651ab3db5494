"""Seeded synthetic inputs for self-tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .density import GaussianWindow, HeadList, generate_density_map
from .errors import InvalidArgumentError


def random_head_list(rng: np.random.Generator, count: int, height: int, width: int,
                     min_separation: int = 0, margin: int = 0) -> HeadList:
    """Uniform random heads, optionally keeping a pairwise Chebyshev
    separation and a margin from every edge.  Rejection-sampled, so keep
    the requested density well under the packing limit."""
    if count < 0:
        raise InvalidArgumentError("count must be non-negative")
    x_lo, x_hi = margin, width - 1 - margin
    y_lo, y_hi = margin, height - 1 - margin
    if count > 0 and (x_lo > x_hi or y_lo > y_hi):
        raise InvalidArgumentError(f"margin {margin} leaves no room in {height}x{width}")
    placed: list[tuple[int, int]] = []
    attempts = 0
    limit = 1000 + 500 * count
    while len(placed) < count:
        attempts += 1
        if attempts > limit:
            raise InvalidArgumentError(
                f"could not place {count} heads with separation {min_separation} "
                f"in {height}x{width} after {limit} attempts")
        x = int(rng.integers(x_lo, x_hi + 1))
        y = int(rng.integers(y_lo, y_hi + 1))
        if min_separation > 0:
            ok = all(max(abs(x - px), abs(y - py)) >= min_separation
                     for px, py in placed)
            if not ok:
                continue
        placed.append((x, y))
    points = np.asarray(placed, dtype=np.int64).reshape(-1, 2)
    return HeadList(points=points, height=height, width=width)


def synthetic_coarse_map(rng: np.random.Generator, height: int, width: int,
                         count: int, window: GaussianWindow | np.ndarray,
                         min_separation: int = 0, margin: int = 0,
                         noise: float = 0.0) -> tuple[np.ndarray, HeadList]:
    """A density map stamped from random heads, plus the heads themselves.

    ``noise`` adds i.i.d. uniform perturbations in [-noise, noise] to every
    pixel, mimicking an imperfect predicted map.
    """
    heads = random_head_list(rng, count, height, width, min_separation, margin)
    dmap = generate_density_map(heads, window)
    if noise > 0.0:
        dmap = dmap + rng.uniform(-noise, noise, size=dmap.shape)
    return dmap, heads
