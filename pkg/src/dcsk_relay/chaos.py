"""Second-order Chebyshev chaotic sequences used as DCSK references.

The raw map ``x -> 1 - 2x^2`` lives on [-1, 1] and its invariant density has
second moment 1/2, so emitted samples are multiplied by sqrt(2) to give unit
variance chips.
"""

import math

import numpy as np

from . import kernels

SCALE = math.sqrt(2.0)

# Seeds whose orbits are fixed or hit a fixed point within two steps.
DEGENERATE_SEEDS = frozenset({0.0, 1.0, -1.0, 0.5, -0.5})


def step(state):
    """One application of the raw Chebyshev map."""
    if not -1.0 <= state <= 1.0:
        raise ValueError(f"state must lie in [-1, 1], got {state}")
    return 1.0 - 2.0 * state * state


class ChaosStream:
    """Stateful generator of normalized chaotic chips.

    Each instance owns its raw state; share a stream between transmitters
    only when they are meant to use the same reference sequence.
    """

    def __init__(self, state, scale=SCALE):
        state = float(state)
        if not -1.0 < state < 1.0:
            raise ValueError(f"raw state must lie in (-1, 1), got {state}")
        if state in DEGENERATE_SEEDS:
            raise ValueError(f"degenerate seed {state}")
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.state = state
        self.scale = float(scale)
        self._keep = 0
        self._recent = np.empty(0)

    def take(self, n):
        """Advance the stream ``n`` steps and return the scaled samples."""
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        out = np.empty(int(n), dtype=np.float64)
        self.state = kernels.chebyshev_fill(self.state, out, self.scale)
        if self._keep:
            self._recent = np.concatenate([self._recent, out])[-self._keep :]
        return out

    def take_with_prefix(self, n, pad):
        """Return the ``pad`` previously emitted samples followed by ``n`` new ones.

        If fewer than ``pad`` samples have been emitted since the stream
        started remembering, the missing ones are generated first.
        """
        if pad < 0:
            raise ValueError("pad must be non-negative")
        if pad == 0:
            return self.take(n)
        self._keep = max(self._keep, int(pad))
        if self._recent.size < pad:
            self.take(pad - self._recent.size)
        prefix = self._recent[-pad:].copy()
        return np.concatenate([prefix, self.take(n)])

    def copy(self):
        return ChaosStream(self.state, self.scale)

    def __repr__(self):
        return f"ChaosStream(state={self.state!r}, scale={self.scale!r})"


def seed(rng):
    """Draw a non-degenerate initial state uniformly on (-1, 1)."""
    while True:
        state = float(rng.uniform(-1.0, 1.0))
        if state not in DEGENERATE_SEEDS and -1.0 < state:
            return ChaosStream(state)


def take(stream, n):
    return stream.take(n)
