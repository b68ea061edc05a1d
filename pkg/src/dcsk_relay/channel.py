"""Two-ray block-fading channel with integer chip delay and AWGN.

Coefficients are drawn once per frame.  Their magnitudes are Rayleigh with the
configured mean power; by default each also carries an independent random
sign, i.e. the coefficients are zero-mean.

Two delay models are available for DCSK blocks:

``"frame-aligned"``
    each half of a frame sees its own chip sequence delayed by ``tau``, the
    gap filled from the chaotic samples preceding the reference (signed by
    the bit in the data half).  No energy leaks between halves or frames.
``"delay-line"``
    the transmitted chips pass a persistent delay line, so the last ``tau``
    chips of each half spill into the next half or frame.

Raw chip arrays (not ``DcskBlock``) always use the delay line.
"""

import math
from dataclasses import dataclass

import numpy as np

from .modem import DcskBlock

FADING_MODELS = ("rayleigh", "static")
DELAY_MODELS = ("frame-aligned", "delay-line")


@dataclass(frozen=True)
class TwoRayLink:
    """Statistics of one hop.

    ``avg_gain_1``/``avg_gain_2`` are the mean powers E[lambda^2] of the two
    rays.  ``fading="static"`` fixes ``lambda_i = sqrt(avg_gain_i)``, which
    with ``(1, 0)`` gives a plain AWGN link.
    """

    avg_gain_1: float
    avg_gain_2: float
    delay: int = 0
    fading: str = "rayleigh"
    random_sign: bool = True

    def __post_init__(self):
        if self.avg_gain_1 < 0 or self.avg_gain_2 < 0:
            raise ValueError("average path gains must be non-negative")
        if self.avg_gain_1 + self.avg_gain_2 <= 0:
            raise ValueError("at least one path must carry power")
        if int(self.delay) != self.delay or self.delay < 0:
            raise ValueError(f"delay must be a non-negative integer, got {self.delay}")
        if self.fading not in FADING_MODELS:
            raise ValueError(f"fading must be one of {FADING_MODELS}, got {self.fading!r}")

    def check_beta(self, beta):
        # delay << 2*beta, enforced as delay < beta/2
        if not 2 * self.delay < beta:
            raise ValueError(f"delay {self.delay} too large for beta={beta} (need delay < beta/2)")

    @property
    def total_gain(self):
        return self.avg_gain_1 + self.avg_gain_2


AWGN_LINK = TwoRayLink(1.0, 0.0, 0, fading="static")


@dataclass(frozen=True)
class LinkRealization:
    """Coefficients for one frame (scalars) or a block of frames (arrays)."""

    lambda_1: object
    lambda_2: object
    delay: int

    @property
    def energy(self):
        return np.square(self.lambda_1) + np.square(self.lambda_2)


def rayleigh_pdf(lam, sigma):
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    lam = np.asarray(lam, dtype=np.float64)
    s2 = sigma * sigma
    out = np.where(lam >= 0, lam / s2 * np.exp(-lam * lam / (2 * s2)), 0.0)
    return float(out) if out.ndim == 0 else out


def _rayleigh(avg_gain, rng, size, random_sign):
    sigma = math.sqrt(avg_gain / 2.0)
    u = rng.standard_normal(size)
    v = rng.standard_normal(size)
    lam = sigma * np.hypot(u, v)
    if random_sign:
        lam = lam * np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return lam


def draw_realization(link, rng, size=None):
    """Draw ray coefficients; ``size`` gives one coefficient pair per frame."""
    if link.fading == "static":
        shape = () if size is None else (size,)
        l1 = np.full(shape, math.sqrt(link.avg_gain_1))
        l2 = np.full(shape, math.sqrt(link.avg_gain_2))
    else:
        l1 = _rayleigh(link.avg_gain_1, rng, size, link.random_sign)
        l2 = _rayleigh(link.avg_gain_2, rng, size, link.random_sign)
    if size is None:
        l1, l2 = float(l1), float(l2)
    return LinkRealization(l1, l2, int(link.delay))


def awgn(shape, n0, rng):
    """Real Gaussian noise with per-sample variance ``n0 / 2``."""
    if n0 < 0:
        raise ValueError("n0 must be non-negative")
    if n0 == 0:
        return np.zeros(shape)
    return rng.standard_normal(shape) * math.sqrt(n0 / 2.0)


def superpose(rx_a, rx_b):
    rx_a = np.asarray(rx_a, dtype=np.float64)
    rx_b = np.asarray(rx_b, dtype=np.float64)
    if rx_a.shape != rx_b.shape:
        raise ValueError(f"shape mismatch: {rx_a.shape} vs {rx_b.shape}")
    return rx_a + rx_b


class TwoRayChannel:
    """One hop's propagation state.

    ``transmit`` accepts a ``DcskBlock``, a single frame (1-D) or consecutive
    frames (2-D, one per row, each row using its own coefficients).
    """

    def __init__(self, link, delay_model="delay-line"):
        if delay_model not in DELAY_MODELS:
            raise ValueError(f"delay_model must be one of {DELAY_MODELS}")
        self.link = link
        self.delay_model = delay_model
        self.history = np.zeros(int(link.delay))

    def reset(self):
        self.history = np.zeros(int(self.link.delay))

    def draw(self, rng, size=None):
        return draw_realization(self.link, rng, size)

    def paths(self, chips):
        """Return ``(direct, delayed)`` chip streams and advance the delay line."""
        tau = int(self.link.delay)
        if isinstance(chips, DcskBlock):
            if self.delay_model == "frame-aligned":
                direct = chips.frames
                return direct, (direct if tau == 0 else chips.delayed(tau))
            chips = chips.frames
        chips = np.asarray(chips, dtype=np.float64)
        if tau == 0:
            return chips, chips
        if tau >= chips.shape[-1]:
            raise ValueError(f"delay {tau} too large for frames of {chips.shape[-1]} chips")
        flat = chips.reshape(-1)
        line = np.concatenate([self.history, flat])
        self.history = line[-tau:].copy()
        return chips, line[: flat.size].reshape(chips.shape)

    def transmit(self, chips, realization, n0, rng):
        """Apply both rays and add noise of spectral level ``n0``."""
        direct, delayed = self.paths(chips)
        l1 = np.asarray(realization.lambda_1, dtype=np.float64)
        l2 = np.asarray(realization.lambda_2, dtype=np.float64)
        if direct.ndim == 2:
            l1, l2 = l1.reshape(-1, 1), l2.reshape(-1, 1)
        out = l1 * direct + l2 * delayed
        return out + awgn(out.shape, n0, rng)


def transmit(chips, realization, channel, n0, rng):
    return channel.transmit(chips, realization, n0, rng)
