"""NumPy fallback for the hot reconstruction kernel.

Keep numerics in lockstep with ``_kernels_c.pyx``: the L1 distance for a
pixel is accumulated over window cells in row-major order with plain
float64 subtract/abs/add, so both backends produce bit-identical
probability maps.
"""

import numpy as np

NAME = "numpy"


def compute_probability(padded, win, out, y0, y1, x0, x1):
    """Fill ``out[y0:y1, x0:x1]`` with 1 / (1 + L1(crop - win)).

    ``padded`` is the working map with a zero margin of (k-1)/2 on every
    side, so the crop centered on output pixel (y, x) is
    ``padded[y:y+k, x:x+k]`` and border crops are implicitly zero-padded.
    """
    k = win.shape[0]
    h, w = y1 - y0, x1 - x0
    if h <= 0 or w <= 0:
        return
    acc = np.zeros((h, w), dtype=np.float64)
    tmp = np.empty((h, w), dtype=np.float64)
    for a in range(k):
        for b in range(k):
            np.subtract(padded[y0 + a:y0 + a + h, x0 + b:x0 + b + w],
                        win[a, b], out=tmp)
            np.abs(tmp, out=tmp)
            acc += tmp
    np.divide(1.0, 1.0 + acc, out=out[y0:y1, x0:x1])
