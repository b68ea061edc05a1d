"""Two-way relay protocols over DCSK.

Scheme 1 (``PNC1``): both users send at once on the same reference; the relay
decodes the superposition into a ternary symbol and maps it to one bit.
Schemes 2 and 3 (``TimeMux2``/``FreqMux3``): the relay receives each user on
an interference-free slot or subchannel, decodes both and forwards their
bipolar product.  ``ANC``: the relay amplifies and forwards the noisy
superposition.  In every case the relay's bit reaches user B, which strips
its own bit to recover user A's.

The simulation functions work on blocks of frames; ``run_*_frame`` wrap them
for a single frame.
"""

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import chaos
from .channel import AWGN_LINK, DELAY_MODELS, TwoRayChannel, TwoRayLink, awgn
from .modem import (
    DcskBlock,
    correlate_frames,
    detect_binary,
    detect_ternary,
    modulate_block,
)


class Scheme(enum.Enum):
    PNC1 = "PNC1"
    TIME_MUX2 = "TimeMux2"
    FREQ_MUX3 = "FreqMux3"
    ANC = "ANC"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        try:
            return _ALIASES[key]
        except KeyError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {name!r}; expected one of {choices}") from None

    @property
    def shared_reference(self):
        return self in (Scheme.PNC1, Scheme.ANC)

    @property
    def multiplexed(self):
        return self in (Scheme.TIME_MUX2, Scheme.FREQ_MUX3)


_ALIASES = {
    "pnc1": Scheme.PNC1, "pnc": Scheme.PNC1, "scheme1": Scheme.PNC1,
    "timemux2": Scheme.TIME_MUX2, "timemux": Scheme.TIME_MUX2, "scheme2": Scheme.TIME_MUX2, "snc": Scheme.TIME_MUX2,
    "freqmux3": Scheme.FREQ_MUX3, "freqmux": Scheme.FREQ_MUX3, "scheme3": Scheme.FREQ_MUX3,
    "anc": Scheme.ANC,
}


def slot_and_bandwidth(scheme, beta, t_c=1.0):
    """Return ``(time_slots, T_n, bandwidth)`` for one end-to-end exchange."""
    scheme = Scheme.parse(scheme)
    w_s = 1.0 / t_c
    slots = 3 if scheme is Scheme.TIME_MUX2 else 2
    bandwidth = 2.0 * w_s if scheme is Scheme.FREQ_MUX3 else w_s
    # each slot carries one 2*beta-chip DCSK symbol
    return slots, slots * 2 * beta * t_c, bandwidth


def relay_op_counts(scheme, packet_bits):
    """Relay decode/map/modulate operations for a packet of ``packet_bits``."""
    scheme = Scheme.parse(scheme)
    if packet_bits < 0:
        raise ValueError("packet_bits must be non-negative")
    p = int(packet_bits)
    if scheme is Scheme.ANC:
        return 0, 0, 0
    if scheme.multiplexed:
        return 2 * p, p, p
    return p, p, p


def _bipolar(x, name):
    arr = np.asarray(x)
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"{name} must be +1 or -1")
    return arr


def _scalar_or_array(out):
    out = np.asarray(out)
    return int(out) if out.ndim == 0 else out


def map_network(s_a, s_b):
    """Bipolar XOR: equal bits map to +1, different bits to -1."""
    return _scalar_or_array(_bipolar(s_a, "s_a") * _bipolar(s_b, "s_b"))


def map_ternary(sym):
    """Relay mapping of a decoded superposition: +-2 -> +1, 0 -> -1."""
    arr = np.asarray(sym)
    if not np.all((arr == 2) | (arr == 0) | (arr == -2)):
        raise ValueError("ternary symbol must be one of +2, 0, -2")
    return _scalar_or_array(np.where(arr == 0, -1, 1))


def demap_at_user(s_decoded, own_bit):
    """Recover the partner's bit: ``|s_D + own| - 1``."""
    d = _bipolar(s_decoded, "s_decoded")
    own = _bipolar(own_bit, "own_bit")
    return _scalar_or_array(np.abs(d + own) - 1)


THRESHOLD_POLICIES = ("mean-level", "fixed")


@dataclass(frozen=True)
class Scenario:
    """Everything needed to simulate one scheme at one Eb/N0.

    ``threshold_policy`` selects the ternary decision threshold used by the
    PNC relay and the ANC receiver:

    ``"mean-level"``
        midpoint between the mean correlator levels of the "same bits" and
        "different bits" hypotheses given the users' channel energies and the
        frame's reference energy, i.e. ``max(S_A, S_B) * sum(x^2)`` (scaled by
        the amplify gain and second-hop energy for ANC).  The cross-user
        product of direct rays is treated as unknown interference.
    ``"fixed"``
        a constant ``threshold`` (default ``Eb = 2 * beta``), times ``G^2`` at
        the ANC receiver.

    ``delay_model`` is passed to every hop (see ``channel``).
    """

    scheme: Scheme
    beta: int
    hop1_a: TwoRayLink
    hop1_b: TwoRayLink
    hop2_b: TwoRayLink
    ebn0_db: float = math.inf
    genie_remove_strong_isi: bool = False
    threshold_policy: str = "mean-level"
    threshold: float | None = None
    packet_bits: int = 100
    hop2_a: TwoRayLink | None = None
    simulate_a_side: bool = False
    delay_model: str = "frame-aligned"

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if int(self.beta) != self.beta or self.beta < 8:
            raise ValueError(f"beta must be an integer >= 8, got {self.beta}")
        for name in ("hop1_a", "hop1_b", "hop2_b", "hop2_a"):
            link = getattr(self, name)
            if link is None:
                continue
            if not isinstance(link, TwoRayLink):
                raise TypeError(f"{name} must be a TwoRayLink")
            try:
                link.check_beta(self.beta)
            except ValueError as exc:
                raise ValueError(f"{name}: {exc}") from None
        if self.threshold_policy not in THRESHOLD_POLICIES:
            raise ValueError(f"threshold_policy must be one of {THRESHOLD_POLICIES}")
        if self.threshold is not None and self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.delay_model not in DELAY_MODELS:
            raise ValueError(f"delay_model must be one of {DELAY_MODELS}")
        if self.packet_bits < 1:
            raise ValueError("packet_bits must be >= 1")
        if self.genie_remove_strong_isi and self.scheme is not Scheme.PNC1:
            raise ValueError("genie strong-ISI removal applies to PNC1 only")

    @property
    def eb(self):
        """Nominal bit energy with unit-variance chips."""
        return 2.0 * self.beta

    @property
    def n0(self):
        if math.isinf(self.ebn0_db) and self.ebn0_db > 0:
            return 0.0
        return self.eb / 10.0 ** (self.ebn0_db / 10.0)

    @property
    def pad(self):
        """Chaos history each frame must carry for the longest delay."""
        return max(link.delay for link in (self.hop1_a, self.hop1_b, self.hop2_b, self.second_hop_a))

    @property
    def second_hop_a(self):
        return self.hop2_a if self.hop2_a is not None else self.hop2_b

    def at(self, ebn0_db):
        return replace(self, ebn0_db=float(ebn0_db))

    def with_scheme(self, scheme):
        scheme = Scheme.parse(scheme)
        genie = self.genie_remove_strong_isi and scheme is Scheme.PNC1
        return replace(self, scheme=scheme, genie_remove_strong_isi=genie)

    def with_special_case(self, which):
        """Replace the low-interference user's links with plain AWGN links."""
        if which == "none":
            return self
        if which == "a_low":
            return replace(self, hop1_a=AWGN_LINK)
        if which == "b_low":
            return replace(self, hop1_b=AWGN_LINK, hop2_b=AWGN_LINK)
        if which == "all_awgn":
            return replace(self, hop1_a=AWGN_LINK, hop1_b=AWGN_LINK, hop2_b=AWGN_LINK,
                           hop2_a=None if self.hop2_a is None else AWGN_LINK)
        raise ValueError(f"unknown special case {which!r}")


@dataclass
class RelayNetwork:
    """Per-run state: chaos generators and delay lines of every hop.

    For the shared-reference schemes ``user_a`` and ``user_b`` are the same
    stream object.
    """

    user_a: chaos.ChaosStream
    user_b: chaos.ChaosStream
    relay: chaos.ChaosStream
    hop1_a: TwoRayChannel
    hop1_b: TwoRayChannel
    hop2_b: TwoRayChannel
    hop2_a: TwoRayChannel

    @classmethod
    def build(cls, scenario, rng):
        user_a = chaos.seed(rng)
        user_b = user_a if scenario.scheme.shared_reference else chaos.seed(rng)
        relay = chaos.seed(rng)
        model = scenario.delay_model
        return cls(
            user_a, user_b, relay,
            TwoRayChannel(scenario.hop1_a, model),
            TwoRayChannel(scenario.hop1_b, model),
            TwoRayChannel(scenario.hop2_b, model),
            TwoRayChannel(scenario.second_hop_a, model),
        )


@dataclass
class FrameOutcome:
    """Bits sent and recovered for a block of frames (or one frame).

    ``relay_bits`` is the relay's mapped bit (absent for ANC), and
    ``relay_statistic`` its correlator output (PNC1 only).
    """

    sent_a: np.ndarray
    sent_b: np.ndarray
    recovered_a_at_b: np.ndarray
    recovered_b_at_a: np.ndarray | None = None
    relay_bits: np.ndarray | None = None
    relay_statistic: np.ndarray | None = field(default=None, repr=False)

    def end_to_end_errors(self):
        return int(np.count_nonzero(self.recovered_a_at_b != self.sent_a))

    def relay_errors(self):
        if self.relay_bits is None:
            raise ValueError("no relay decision for this scheme")
        return int(np.count_nonzero(self.relay_bits != self.sent_a * self.sent_b))

    def scalar(self):
        """Collapse a one-frame outcome to Python ints."""
        def one(x):
            return None if x is None else (float(x[0]) if x.dtype.kind == "f" else int(x[0]))
        return FrameOutcome(
            one(self.sent_a), one(self.sent_b), one(self.recovered_a_at_b),
            one(self.recovered_b_at_a), one(self.relay_bits), one(self.relay_statistic),
        )


def _cross(u, v, beta):
    """Correlator contribution of u's reference with v's data and vice versa."""
    return (np.einsum("ij,ij->i", u[:, :beta], v[:, beta:])
            + np.einsum("ij,ij->i", v[:, :beta], u[:, beta:]))


def _col(x):
    return np.asarray(x, dtype=np.float64)[:, None]


def _broadcast(scenario, net, mapped, s_a, s_b, rng):
    """Relay modulates ``mapped``; users decode it and strip their own bit."""
    block = modulate_block(mapped, net.relay, scenario.beta, scenario.pad)
    n = mapped.size
    rx_b = net.hop2_b.transmit(block, net.hop2_b.draw(rng, n), scenario.n0, rng)
    a_hat = demap_at_user(detect_binary(correlate_frames(rx_b)), s_b)
    b_hat = None
    if scenario.simulate_a_side:
        rx_a = net.hop2_a.transmit(block, net.hop2_a.draw(rng, n), scenario.n0, rng)
        b_hat = demap_at_user(detect_binary(correlate_frames(rx_a)), s_a)
    return np.atleast_1d(a_hat), None if b_hat is None else np.atleast_1d(b_hat)


def _superposed_uplink(scenario, net, s_a, s_b, rng):
    """Both users on one shared reference, summed at the relay with one noise."""
    n = s_a.size
    e_a = modulate_block(s_a, net.user_a, scenario.beta, scenario.pad)
    e_b = DcskBlock(s_b, e_a.extended, scenario.beta)
    ref = e_a.reference
    real_a = net.hop1_a.draw(rng, n)
    real_b = net.hop1_b.draw(rng, n)
    dir_a, del_a = net.hop1_a.paths(e_a)
    dir_b, del_b = net.hop1_b.paths(e_b)
    rx = (_col(real_a.lambda_1) * dir_a + _col(real_a.lambda_2) * del_a
          + _col(real_b.lambda_1) * dir_b + _col(real_b.lambda_2) * del_b)
    rx = rx + awgn(rx.shape, scenario.n0, rng)
    ref_energy = np.einsum("ij,ij->i", ref, ref)
    return rx, ref_energy, real_a, real_b, (dir_a, del_a, dir_b, del_b)


def _check(scenario, allowed):
    if scenario.scheme not in allowed:
        names = "/".join(s.value for s in allowed)
        raise ValueError(f"scenario scheme {scenario.scheme.value} cannot run as {names}")


def _bits(s_a, s_b):
    s_a = np.atleast_1d(_bipolar(s_a, "s_a")).astype(np.int64)
    s_b = np.atleast_1d(_bipolar(s_b, "s_b")).astype(np.int64)
    if s_a.shape != s_b.shape:
        raise ValueError("s_a and s_b must have the same length")
    return s_a, s_b


def run_pnc_frames(scenario, net, s_a, s_b, rng):
    _check(scenario, (Scheme.PNC1,))
    s_a, s_b = _bits(s_a, s_b)
    beta = scenario.beta
    rx, ref_energy, real_a, real_b, paths = _superposed_uplink(scenario, net, s_a, s_b, rng)
    d = correlate_frames(rx)
    if scenario.genie_remove_strong_isi:
        dir_a, del_a, dir_b, del_b = paths
        d = d - (real_a.lambda_1 * real_b.lambda_1 * _cross(dir_a, dir_b, beta)
                 + real_a.lambda_2 * real_b.lambda_2 * _cross(del_a, del_b, beta))
    if scenario.threshold_policy == "fixed":
        theta = np.full(s_a.size, scenario.threshold or scenario.eb)
    else:
        theta = np.maximum(real_a.energy, real_b.energy) * ref_energy
    mapped = np.atleast_1d(map_ternary(detect_ternary(d, theta)))
    a_hat, b_hat = _broadcast(scenario, net, mapped, s_a, s_b, rng)
    return FrameOutcome(s_a, s_b, a_hat, b_hat, mapped, d)


def run_mux_frames(scenario, net, s_a, s_b, rng):
    """Schemes 2 and 3; the sample-level processing is identical for both."""
    _check(scenario, (Scheme.TIME_MUX2, Scheme.FREQ_MUX3))
    s_a, s_b = _bits(s_a, s_b)
    n = s_a.size
    e_a = modulate_block(s_a, net.user_a, scenario.beta, scenario.pad)
    e_b = modulate_block(s_b, net.user_b, scenario.beta, scenario.pad)
    rx_a = net.hop1_a.transmit(e_a, net.hop1_a.draw(rng, n), scenario.n0, rng)
    rx_b = net.hop1_b.transmit(e_b, net.hop1_b.draw(rng, n), scenario.n0, rng)
    dec_a = detect_binary(correlate_frames(rx_a))
    dec_b = detect_binary(correlate_frames(rx_b))
    mapped = np.atleast_1d(map_network(dec_a, dec_b))
    a_hat, b_hat = _broadcast(scenario, net, mapped, s_a, s_b, rng)
    return FrameOutcome(s_a, s_b, a_hat, b_hat, mapped)


def _packet_gain(rx, packet_bits, p_out=1.0):
    """Amplify gain per packet normalizing mean received chip power to ``p_out``."""
    n = rx.shape[0]
    power = np.mean(rx * rx, axis=1)
    starts = np.arange(0, n, packet_bits)
    counts = np.diff(np.append(starts, n))
    mean_power = np.add.reduceat(power, starts) / counts
    with np.errstate(divide="ignore"):
        gains = np.where(mean_power > 0, np.sqrt(p_out / mean_power), 0.0)
    return np.repeat(gains, counts)


def _anc_receive(scenario, net_channel, forwarded, gain, level, rng, own):
    n = forwarded.shape[0]
    real = net_channel.draw(rng, n)
    rx = net_channel.transmit(forwarded, real, scenario.n0, rng)
    d = correlate_frames(rx)
    if scenario.threshold_policy == "fixed":
        theta = gain**2 * (scenario.threshold or scenario.eb)
    else:
        theta = gain**2 * real.energy * level
    s_d = np.where(np.abs(d) > theta, 1, -1)
    return np.atleast_1d(demap_at_user(s_d, own))


def run_anc_frames(scenario, net, s_a, s_b, rng):
    _check(scenario, (Scheme.ANC,))
    s_a, s_b = _bits(s_a, s_b)
    rx, ref_energy, real_a, real_b, _ = _superposed_uplink(scenario, net, s_a, s_b, rng)
    gain = _packet_gain(rx, scenario.packet_bits)
    forwarded = gain[:, None] * rx
    level = np.maximum(real_a.energy, real_b.energy) * ref_energy
    a_hat = _anc_receive(scenario, net.hop2_b, forwarded, gain, level, rng, s_b)
    b_hat = None
    if scenario.simulate_a_side:
        b_hat = _anc_receive(scenario, net.hop2_a, forwarded, gain, level, rng, s_a)
    return FrameOutcome(s_a, s_b, a_hat, b_hat)


_RUNNERS = {
    Scheme.PNC1: run_pnc_frames,
    Scheme.TIME_MUX2: run_mux_frames,
    Scheme.FREQ_MUX3: run_mux_frames,
    Scheme.ANC: run_anc_frames,
}


def run_frames(scenario, net, s_a, s_b, rng):
    return _RUNNERS[scenario.scheme](scenario, net, s_a, s_b, rng)


def simulate_block(scenario, n_frames, rng):
    """Fresh network state, random bits, ``n_frames`` frames."""
    net = RelayNetwork.build(scenario, rng)
    s_a = np.where(rng.random(n_frames) < 0.5, -1, 1)
    s_b = np.where(rng.random(n_frames) < 0.5, -1, 1)
    return run_frames(scenario, net, s_a, s_b, rng)


def run_pnc_frame(scenario, net, rng, s_a, s_b):
    return run_pnc_frames(scenario, net, s_a, s_b, rng).scalar()


def run_mux_frame(scenario, net, rng, s_a, s_b):
    return run_mux_frames(scenario, net, s_a, s_b, rng).scalar()


def run_anc_frame(scenario, net, rng, s_a, s_b):
    return run_anc_frames(scenario, net, s_a, s_b, rng).scalar()
