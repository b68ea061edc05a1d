"""Closed-form BER, throughput and spectral-efficiency expressions.

Per-hop BER of a DCSK link over a two-ray Rayleigh channel is the
instantaneous Gaussian-approximation BER averaged over the distribution of
the combined SNR ``gamma = (lambda_1^2 + lambda_2^2) Eb/N0``.  The three hops
of the multiplexed schemes combine as independent binary symmetric channels.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureError, integrate
from .schemes import Scheme, slot_and_bandwidth
from .special import erfc

# Relative gap below which the two path SNRs are treated as identical.
EPS_SWITCH = 1e-9
REL_TOL = 1e-8
TAIL_FRACTION = 1e-14
_LEGENDRE_U = np.polynomial.legendre.leggauss(48)


@dataclass(frozen=True)
class SnrPoint:
    """Average per-path SNRs (linear) of one hop and the half-frame length."""

    gamma_bar_1: float
    gamma_bar_2: float
    beta: int

    def __post_init__(self):
        if self.gamma_bar_1 < 0 or self.gamma_bar_2 < 0:
            raise ValueError("average SNRs must be non-negative")
        if self.gamma_bar_1 == 0 and self.gamma_bar_2 == 0:
            raise ValueError("at least one average SNR must be positive")
        if self.beta < 1:
            raise ValueError("beta must be >= 1")

    @classmethod
    def from_link(cls, link, ebn0, beta):
        return cls(ebn0 * link.avg_gain_1, ebn0 * link.avg_gain_2, beta)


@dataclass(frozen=True)
class LinkBerTriple:
    ber_1a: float
    ber_1b: float
    ber_2b: float

    def __post_init__(self):
        for name in ("ber_1a", "ber_1b", "ber_2b"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def db_to_linear(db):
    out = 10.0 ** (np.asarray(db, dtype=np.float64) / 10.0)
    return float(out) if out.ndim == 0 else out


def _ber_from_arg2(inv_arg2):
    # 0.5 * erfc(inv_arg2 ** -0.5), with inv_arg2 = +inf mapping to 0.5
    with np.errstate(divide="ignore"):
        arg = 1.0 / np.sqrt(inv_arg2)
    return 0.5 * erfc(arg)


def _instantaneous(gamma, beta):
    gamma = np.asarray(gamma, dtype=np.float64)
    # (4/g + 2b/g^2)^(-1/2) == g / sqrt(4g + 2b); finite at g = 0
    arg = gamma / np.sqrt(4.0 * gamma + 2.0 * beta)
    return 0.5 * erfc(arg)


def instantaneous_ber(gamma, beta):
    """DCSK BER at a given instantaneous SNR (Gaussian approximation)."""
    g = np.asarray(gamma, dtype=np.float64)
    if np.any(g <= 0):
        raise ValueError("gamma must be positive")
    out = np.asarray(_instantaneous(g, beta))
    return float(out) if out.ndim == 0 else out


def awgn_ber(ebn0, beta):
    """Single-path, non-fading link: ``instantaneous_ber`` at gamma = Eb/N0."""
    return instantaneous_ber(ebn0, beta)


def _identical(point):
    g1, g2 = point.gamma_bar_1, point.gamma_bar_2
    return abs(g1 - g2) <= EPS_SWITCH * max(g1, g2)


def snr_pdf(gamma, point):
    """Density of the combined SNR of two independent Rayleigh rays."""
    g = np.asarray(gamma, dtype=np.float64)
    g1, g2 = point.gamma_bar_1, point.gamma_bar_2
    pos = np.maximum(g, 0.0)
    if _identical(point):
        out = pos / (g1 * g1) * np.exp(-pos / g1)
    elif g1 == 0 or g2 == 0:
        gb = max(g1, g2)
        out = np.exp(-pos / gb) / gb
    else:
        # symmetric in (g1, g2); factor out the slower exponential so the
        # difference is an expm1 with negative argument (no cancellation)
        hi, lo = max(g1, g2), min(g1, g2)
        out = -np.exp(-pos / hi) * np.expm1(-pos * (1.0 / lo - 1.0 / hi)) / (hi - lo)
    out = np.where(g < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def snr_tail(gamma, point):
    """P(combined SNR > gamma)."""
    g1, g2 = point.gamma_bar_1, point.gamma_bar_2
    if _identical(point):
        return (1.0 + gamma / g1) * math.exp(-gamma / g1)
    if g1 == 0 or g2 == 0:
        return math.exp(-gamma / max(g1, g2))
    return (g1 * math.exp(-gamma / g1) - g2 * math.exp(-gamma / g2)) / (g1 - g2)


def _with_term_c(point):
    """Integrand over gamma keeping the intra-frame ray cross-product variance.

    The extra term depends on how gamma splits between the rays, so the split
    fraction u = gamma_1 / gamma is integrated out with Gauss-Legendre.
    """
    beta = point.beta
    eb = 2.0 * beta
    g1, g2 = point.gamma_bar_1, point.gamma_bar_2
    nodes, weights = _LEGENDRE_U
    u = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    c = 16.0 * u * (1.0 - u) / eb

    def f(gamma):
        gamma = np.asarray(gamma, dtype=np.float64)[:, None]
        dens = gamma / (g1 * g2) * np.exp(-gamma * (u / g1 + (1.0 - u) / g2))
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = c + 4.0 / gamma + 2.0 * beta / gamma**2
        ber = np.where(gamma > 0, _ber_from_arg2(inv), 0.5)
        return (ber * dens) @ w

    return f


def average_ber(point, include_term_c=False):
    """Fading-averaged BER of one hop.

    Integrates on [0, 50 * max(gamma_bar)], extending the range until the
    analytic tail bound drops below ``TAIL_FRACTION`` of the running total.
    """
    beta = point.beta
    gmax_bar = max(point.gamma_bar_1, point.gamma_bar_2)
    use_c = include_term_c and point.gamma_bar_1 > 0 and point.gamma_bar_2 > 0
    if use_c:
        f = _with_term_c(point)
    else:
        def f(gamma):
            return _instantaneous(gamma, beta) * snr_pdf(gamma, point)

    upper = 50.0 * gmax_bar
    for _ in range(20):
        knots = [0.0, upper]
        for k in (point.gamma_bar_1, point.gamma_bar_2, 3.0 * math.sqrt(2.0 * beta)):
            if 0 < k < upper:
                knots.append(k)
        try:
            total, _err = integrate(f, sorted(knots), rel_tol=REL_TOL, abs_tol=1e-300)
        except QuadratureError as exc:
            raise QuadratureError(
                f"average_ber failed for {point}", exc.estimate, exc.error, exc.intervals
            ) from exc
        if use_c:
            # worst case of the ray-split term is u = 1/2
            inv = 2.0 / beta + 4.0 / upper + 2.0 * beta / upper**2
            tail_ber = float(_ber_from_arg2(inv))
        else:
            tail_ber = float(_instantaneous(upper, beta))
        tail = tail_ber * snr_tail(upper, point)
        if tail <= TAIL_FRACTION * total:
            return total
        upper *= 2.0
    raise QuadratureError(f"tail bound not met for {point}", total, tail, 0)


def relay_ber(ber_a, ber_b):
    """Error probability of the relay's combined bit (exactly one hop wrong)."""
    return ber_a * (1.0 - ber_b) + ber_b * (1.0 - ber_a)


def end_to_end_ber(t):
    a, b, c = t.ber_1a, t.ber_1b, t.ber_2b
    return a + b + c - 2 * a * b - 2 * a * c - 2 * b * c + 4 * a * b * c


def link_ber(link, ebn0, beta, include_term_c=False):
    """BER of one hop at linear Eb/N0, dispatching on the fading model."""
    if link.fading == "static":
        gamma = link.total_gain * ebn0
        if include_term_c:
            eb = 2.0 * beta
            s = link.total_gain
            inv = 16 * link.avg_gain_1 * link.avg_gain_2 / (s * s * eb) + 4.0 / gamma + 2.0 * beta / gamma**2
            return float(_ber_from_arg2(inv))
        return instantaneous_ber(gamma, beta)
    return average_ber(SnrPoint.from_link(link, ebn0, beta), include_term_c)


def link_bers(hop1_a, hop1_b, hop2_b, ebn0, beta, include_term_c=False):
    return LinkBerTriple(
        link_ber(hop1_a, ebn0, beta, include_term_c),
        link_ber(hop1_b, ebn0, beta, include_term_c),
        link_ber(hop2_b, ebn0, beta, include_term_c),
    )


SPECIAL_CASES = ("none", "a_low", "b_low", "all_awgn")


def special_case_ber(which, ebn0, beta, hop1_a, hop1_b, hop2_b, include_term_c=False):
    """End-to-end BER with the low-interference user's links replaced by AWGN.

    ``which`` is ``"a_low"`` (user A's uplink is AWGN), ``"b_low"`` (both of
    user B's links are AWGN), ``"all_awgn"`` or ``"none"``.
    """
    if which not in SPECIAL_CASES:
        raise ValueError(f"unknown special case {which!r}; expected one of {SPECIAL_CASES}")
    awgn = awgn_ber(ebn0, beta)
    if which == "all_awgn":
        t = LinkBerTriple(awgn, awgn, awgn)
    else:
        t = link_bers(hop1_a, hop1_b, hop2_b, ebn0, beta, include_term_c)
        if which == "a_low":
            t = LinkBerTriple(awgn, t.ber_1b, t.ber_2b)
        elif which == "b_low":
            t = LinkBerTriple(t.ber_1a, awgn, awgn)
    return end_to_end_ber(t)


def throughput(ber, t_n, bits_per_symbol=1):
    """Correct bits delivered per unit time (binary DCSK: log2 M = 1)."""
    if t_n <= 0:
        raise ValueError("t_n must be positive")
    return bits_per_symbol * (1.0 - ber) / t_n


def spectral_efficiency(scheme, ber, beta, t_c=1.0):
    scheme = Scheme.parse(scheme)
    if scheme not in (Scheme.TIME_MUX2, Scheme.FREQ_MUX3):
        raise ValueError(f"spectral efficiency is defined only for the multiplexed schemes, not {scheme.value}")
    _, t_n, w = slot_and_bandwidth(scheme, beta, t_c)
    return throughput(ber, t_n) / w
