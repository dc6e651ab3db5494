# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled reconstruction kernel.

Must stay numerically identical to ``_kernels_py.compute_probability``:
same per-pixel accumulation order (window cells row-major), plain IEEE
double ops, no fast-math.
"""

from libc.math cimport fabs

NAME = "compiled"


def compute_probability(const double[:, ::1] padded, const double[:, ::1] win,
                        double[:, :] out,
                        Py_ssize_t y0, Py_ssize_t y1,
                        Py_ssize_t x0, Py_ssize_t x1):
    """Fill ``out[y0:y1, x0:x1]`` with 1 / (1 + L1(crop - win))."""
    cdef Py_ssize_t k = win.shape[0]
    cdef Py_ssize_t i, j, a, b
    cdef double s
    for i in range(y0, y1):
        for j in range(x0, x1):
            s = 0.0
            for a in range(k):
                for b in range(k):
                    s += fabs(padded[i + a, j + b] - win[a, b])
            out[i, j] = 1.0 / (1.0 + s)
