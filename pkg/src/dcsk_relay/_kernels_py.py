"""Pure-Python versions of the compiled kernels.

``chebyshev_fill`` reproduces the compiled loop operation for operation, so
both backends emit bit-identical chaos streams.  ``correlate_halves`` uses a
numpy reduction whose summation order differs from the sequential C loop;
results agree to rounding.
"""

import numpy as np

REINJECT = 0.41421356237309515


def chebyshev_fill(state, out, scale):
    x = state
    vals = [0.0] * len(out)
    for i in range(len(vals)):
        x = 1.0 - 2.0 * x * x
        if x == -1.0 or x == 0.5:
            x = REINJECT
        vals[i] = scale * x
    out[:] = vals
    return x


def correlate_halves(rx):
    rx = np.asarray(rx, dtype=np.float64)
    width = rx.shape[1]
    if width % 2:
        raise ValueError(f"frame width must be even, got {width}")
    half = width // 2
    return np.einsum("ij,ij->i", rx[:, :half], rx[:, half:])
