# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Must stay bit-compatible with ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

# Re-entry point used when an orbit lands exactly on a fixed point of the map.
cdef double REINJECT = 0.41421356237309515


def chebyshev_fill(double state, double[::1] out, double scale):
    """Iterate ``x <- 1 - 2x^2`` len(out) times, writing ``scale * x``.

    Returns the final raw state.
    """
    cdef Py_ssize_t i, n = out.shape[0]
    cdef double x = state
    with nogil:
        for i in range(n):
            x = 1.0 - 2.0 * x * x
            if x == -1.0 or x == 0.5:
                x = REINJECT
            out[i] = scale * x
    return x


def correlate_halves(const double[:, ::1] rx):
    """Row-wise sum of first-half times second-half products."""
    cdef Py_ssize_t f, k, nf = rx.shape[0], width = rx.shape[1]
    cdef Py_ssize_t half = width // 2
    cdef double acc
    if width % 2:
        raise ValueError(f"frame width must be even, got {width}")
    out = np.empty(nf, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for f in range(nf):
            acc = 0.0
            for k in range(half):
                acc = acc + rx[f, k] * rx[f, k + half]
            res[f] = acc
    return out
