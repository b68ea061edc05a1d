"""DCSK modulation and correlator detection.

A frame is ``2 * beta`` chips: ``beta`` reference chips followed by the same
chips multiplied by the data bit.  Functions with a ``_frames`` suffix work on
2-D arrays holding one frame per row.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class DcskFrame:
    beta: int
    chips: np.ndarray

    def __post_init__(self):
        if self.chips.shape != (2 * self.beta,):
            raise ValueError(
                f"frame needs {2 * self.beta} chips, got shape {self.chips.shape}"
            )

    @property
    def reference(self):
        return self.chips[: self.beta]

    @property
    def data(self):
        return self.chips[self.beta :]

    @property
    def energy(self):
        return float(np.dot(self.chips, self.chips))


@dataclass(frozen=True)
class DcskBlock:
    """Consecutive frames from one chaos stream.

    Row ``i`` of ``extended`` holds the ``pad`` chaotic samples emitted just
    before frame ``i``'s reference, followed by the reference itself.  The
    prefix lets a channel form each half's delayed ray from the same
    sequence, without leakage between halves or frames.
    """

    bits: np.ndarray
    extended: np.ndarray
    beta: int

    @property
    def pad(self):
        return self.extended.shape[1] - self.beta

    @property
    def reference(self):
        return self.extended[:, self.pad :]

    @property
    def frames(self):
        return frames_from_reference(self.bits, self.reference)

    def delayed(self, tau):
        """Frames built from the reference delayed by ``tau`` chips."""
        if not 0 <= tau <= self.pad:
            raise ValueError(f"delay {tau} exceeds the block prefix of {self.pad} chips")
        start = self.pad - tau
        return frames_from_reference(self.bits, self.extended[:, start : start + self.beta])


def _check_bits(bits):
    bits = np.asarray(bits)
    if not np.all((bits == 1) | (bits == -1)):
        raise ValueError("bits must be +1 or -1")
    return bits


def frames_from_reference(bits, reference):
    """Build frames from per-frame reference rows (shape ``(F, beta)``)."""
    bits = _check_bits(bits).astype(np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    return np.concatenate([reference, bits[:, None] * reference], axis=1)


def modulate_frames(bits, stream, beta):
    """Modulate a bit vector; consumes ``len(bits) * beta`` chips from ``stream``."""
    bits = _check_bits(bits)
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    reference = stream.take(bits.size * beta).reshape(bits.size, beta)
    return frames_from_reference(bits, reference)


def modulate_block(bits, stream, beta, pad=0):
    """Like ``modulate_frames`` but keeps ``pad`` chips of history per frame."""
    bits = _check_bits(bits)
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    n = bits.size
    flat = stream.take_with_prefix(n * beta, pad)
    windows = np.lib.stride_tricks.sliding_window_view(flat, pad + beta)[::beta][:n]
    return DcskBlock(bits, np.ascontiguousarray(windows), beta)


def modulate(bit, stream, beta):
    chips = modulate_frames(np.array([bit]), stream, beta)[0]
    return DcskFrame(beta, chips)


def correlate_frames(received):
    received = np.ascontiguousarray(received, dtype=np.float64)
    if received.ndim != 2:
        raise ValueError("expected a 2-D array of frames")
    return kernels.correlate_halves(received)


def correlate(received, beta=None):
    """Correlate the two halves of one received frame.

    Pass ``beta`` to have the length checked against ``2 * beta``.
    """
    received = np.asarray(received, dtype=np.float64)
    if received.ndim != 1 or received.size % 2:
        raise ValueError(f"received frame must be 1-D of even length, got {received.shape}")
    if beta is not None and received.size != 2 * beta:
        raise ValueError(f"expected {2 * beta} chips, got {received.size}")
    half = received.size // 2
    return float(np.dot(received[:half], received[half:]))


def detect_binary(d):
    """Sign decision; a zero statistic decodes as +1."""
    out = np.where(np.asarray(d) >= 0, 1, -1)
    return int(out) if out.ndim == 0 else out


def detect_ternary(d, threshold):
    """Map a statistic to +2, 0 or -2 using a symmetric threshold."""
    threshold = np.asarray(threshold, dtype=np.float64)
    if np.any(threshold <= 0):
        raise ValueError("threshold must be positive")
    d = np.asarray(d, dtype=np.float64)
    out = np.where(d > threshold, 2, np.where(d < -threshold, -2, 0))
    return int(out) if out.ndim == 0 else out
