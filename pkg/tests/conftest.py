"""Shared independent oracles for the test suite.

These are deliberately written as explicit loops over the math, not as
calls into the package, so they stay independent of the code they check.
"""

import numpy as np


def brute_probability(coarse, win, x, y):
    """Window-similarity score at one pixel by direct crop-and-sum."""
    k = win.shape[0]
    half = (k - 1) // 2
    height, width = coarse.shape
    s = 0.0
    for a in range(k):
        for b in range(k):
            yy, xx = y - half + a, x - half + b
            v = coarse[yy, xx] if 0 <= yy < height and 0 <= xx < width else 0.0
            s += abs(v - win[a, b])
    return 1.0 / (1.0 + s)


def reference_ssim(a, b, side=11, sigma=1.5, dynamic_range=255.0, k1=0.01, k2=0.03):
    """Structural similarity by explicit per-window weighted sums."""
    taps = np.exp(-((np.arange(side) - (side - 1) / 2.0) ** 2) / (2.0 * sigma ** 2))
    taps = taps / taps.sum()
    weights = np.outer(taps, taps)
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2
    height, width = a.shape
    scores = []
    for i in range(height - side + 1):
        for j in range(width - side + 1):
            wa = a[i:i + side, j:j + side]
            wb = b[i:i + side, j:j + side]
            mx = float((weights * wa).sum())
            my = float((weights * wb).sum())
            vx = float((weights * wa * wa).sum()) - mx * mx
            vy = float((weights * wb * wb).sum()) - my * my
            cov = float((weights * wa * wb).sum()) - mx * my
            scores.append(((2 * mx * my + c1) * (2 * cov + c2))
                          / ((mx * mx + my * my + c1) * (vx + vy + c2)))
    return float(np.mean(scores))


def greedy_chebyshev_matches(recovered, truth, radius):
    """Count recovered points having an unused true point within radius."""
    free = list(truth)
    matched = 0
    for rx, ry in recovered:
        best = None
        best_d = None
        for idx, (tx, ty) in enumerate(free):
            d = max(abs(rx - tx), abs(ry - ty))
            if best_d is None or d < best_d:
                best, best_d = idx, d
        if best is not None and best_d <= radius:
            free.pop(best)
            matched += 1
    return matched
