import math

import numpy as np
import pytest

from dcsk_relay import AWGN_LINK, LinkRealization, TwoRayChannel, TwoRayLink, chaos, channel
from dcsk_relay.modem import correlate_frames, modulate_block
from dcsk_relay.quadrature import integrate


def test_link_validation():
    with pytest.raises(ValueError):
        TwoRayLink(0.0, 0.0)
    with pytest.raises(ValueError):
        TwoRayLink(-1.0, 0.5)
    with pytest.raises(ValueError):
        TwoRayLink(1.0, 0.5, delay=-1)
    with pytest.raises(ValueError):
        TwoRayLink(1.0, 0.5, fading="rician")
    TwoRayLink(1.0, 0.5, delay=12).check_beta(25)
    with pytest.raises(ValueError):
        TwoRayLink(1.0, 0.5, delay=13).check_beta(25)


def test_rayleigh_pdf_examples():
    assert channel.rayleigh_pdf(0.0, 0.7) == 0.0
    assert channel.rayleigh_pdf(-1.0, 0.7) == 0.0
    with pytest.raises(ValueError):
        channel.rayleigh_pdf(1.0, 0.0)
    sigma = 0.7
    total, _ = integrate(lambda x: channel.rayleigh_pdf(x, sigma), [0, sigma, 40 * sigma])
    assert abs(total - 1.0) < 1e-8
    m2, _ = integrate(lambda x: x * x * channel.rayleigh_pdf(x, sigma), [0, sigma, 40 * sigma])
    assert m2 == pytest.approx(2 * sigma**2, rel=1e-9)


def test_draw_second_moment():
    rng = np.random.default_rng(1)
    r = channel.draw_realization(TwoRayLink(0.9, 0.4), rng, size=10**6)
    assert 0.891 <= np.mean(r.lambda_1**2) <= 0.909
    assert np.mean(r.lambda_2**2) == pytest.approx(0.4, rel=0.01)


def test_draw_magnitudes_rayleigh():
    rng = np.random.default_rng(2)
    r = channel.draw_realization(TwoRayLink(0.9, 0.4, random_sign=False), rng, size=10**5)
    assert np.all(r.lambda_1 >= 0)
    # Rayleigh mean is sigma*sqrt(pi/2)
    assert np.mean(r.lambda_1) == pytest.approx(math.sqrt(0.45) * math.sqrt(math.pi / 2), rel=0.01)


def test_random_sign_is_symmetric():
    r = channel.draw_realization(TwoRayLink(1.0, 1.0), np.random.default_rng(3), size=10**5)
    assert abs(np.mean(np.sign(r.lambda_1))) < 0.02


def test_zero_gain_path_is_off():
    r = channel.draw_realization(TwoRayLink(1.0, 0.0), np.random.default_rng(4), size=1000)
    assert np.all(r.lambda_2 == 0)


def test_draw_reproducible():
    link = TwoRayLink(0.5, 0.5, 2)
    a = channel.draw_realization(link, np.random.default_rng(7), size=10)
    b = channel.draw_realization(link, np.random.default_rng(7), size=10)
    assert np.array_equal(a.lambda_1, b.lambda_1)
    s = channel.draw_realization(link, np.random.default_rng(7))
    assert isinstance(s.lambda_1, float) and s.delay == 2


def test_static_link():
    r = channel.draw_realization(AWGN_LINK, np.random.default_rng(0), size=3)
    assert r.lambda_1.tolist() == [1.0, 1.0, 1.0]
    assert r.energy.tolist() == [1.0, 1.0, 1.0]


def test_transmit_examples():
    rng = np.random.default_rng(0)
    x = np.array([1.5, -2.0, 0.25])
    ch = TwoRayChannel(TwoRayLink(1.0, 1.0, 0))
    assert channel.transmit(x, LinkRealization(1.0, 0.0, 0), ch, 0.0, rng).tolist() == x.tolist()
    assert ch.transmit(x, LinkRealization(1.0, 1.0, 0), 0.0, rng).tolist() == (2 * x).tolist()
    ch = TwoRayChannel(TwoRayLink(1.0, 1.0, 1))
    assert ch.transmit(x, LinkRealization(0.0, 1.0, 1), 0.0, rng).tolist() == [0.0, 1.5, -2.0]


def test_delay_line_carries_over_between_calls():
    ch = TwoRayChannel(TwoRayLink(1.0, 1.0, 2))
    real = LinkRealization(0.0, 1.0, 2)
    rng = np.random.default_rng(0)
    ch.transmit(np.array([1.0, 2.0, 3.0, 4.0]), real, 0.0, rng)
    out = ch.transmit(np.array([5.0, 6.0, 7.0, 8.0]), real, 0.0, rng)
    assert out.tolist() == [3.0, 4.0, 5.0, 6.0]
    ch.reset()
    assert ch.transmit(np.array([5.0, 6.0, 7.0, 8.0]), real, 0.0, rng).tolist() == [0, 0, 5, 6]
    with pytest.raises(ValueError):
        TwoRayChannel(TwoRayLink(1.0, 1.0, 4)).transmit(np.ones(4), real, 0.0, rng)


def test_frame_aligned_delay_keeps_dcsk_structure():
    bits = np.array([1, -1, -1, 1])
    blk = modulate_block(bits, chaos.ChaosStream(0.37), 10, pad=3)
    ch = TwoRayChannel(TwoRayLink(1.0, 1.0, 3), "frame-aligned")
    n = bits.size
    out = ch.transmit(blk, LinkRealization(np.zeros(n), np.ones(n), 3), 0.0, np.random.default_rng(0))
    np.testing.assert_array_equal(out, blk.delayed(3))
    np.testing.assert_array_equal(out[:, 10:], bits[:, None] * out[:, :10])
    # the delay-line model on the same block leaks the previous data half
    dl = TwoRayChannel(TwoRayLink(1.0, 1.0, 3), "delay-line")
    leaked = dl.transmit(blk, LinkRealization(np.zeros(n), np.ones(n), 3), 0.0, np.random.default_rng(0))
    np.testing.assert_array_equal(leaked[1, :3], blk.frames[0, -3:])
    with pytest.raises(ValueError):
        TwoRayChannel(AWGN_LINK, "ideal")


def test_superpose():
    v = np.array([1.0, -2.0])
    assert channel.superpose(v, np.zeros(2)).tolist() == v.tolist()
    assert channel.superpose(v, -v).tolist() == [0.0, 0.0]
    assert channel.superpose([1, 2], [3, 4]).tolist() == [4.0, 6.0]
    with pytest.raises(ValueError):
        channel.superpose([1, 2], [1, 2, 3])


def test_awgn_variance_and_independence():
    rng = np.random.default_rng(11)
    n = channel.awgn(10**6, 3.0, rng)
    assert np.var(n) == pytest.approx(1.5, rel=0.01)
    assert abs(np.mean(n[:-1] * n[1:]) / np.var(n)) < 0.01
    assert not channel.awgn(5, 0.0, rng).any()
    with pytest.raises(ValueError):
        channel.awgn(5, -1.0, rng)


def test_flat_channel_output_distribution():
    # tau=0, lambda_2=0: received chip = lambda_1 * chip
    rng = np.random.default_rng(12)
    link = TwoRayLink(0.8, 0.0, 0, random_sign=False)
    ch = TwoRayChannel(link)
    n = 20000
    frames = np.ones((n, 2))
    out = ch.transmit(frames, ch.draw(rng, n), 0.0, rng)
    assert np.all(out[:, 0] == out[:, 1])
    # |lambda|^2 is exponential with mean 0.8: check a few quantiles
    for q in (0.25, 0.5, 0.9):
        assert np.quantile(out[:, 0] ** 2, q) == pytest.approx(-0.8 * math.log(1 - q), rel=0.05)


def test_correlator_snr_matches_configured_gamma():
    # frozen coefficients; invert the Gaussian-approximation BER argument
    rng = np.random.default_rng(13)
    beta, ebn0_db, l1, l2 = 100, 10.0, 0.8, -0.6
    n = 10**5
    blk = modulate_block(np.ones(n, dtype=int), chaos.seed(rng), beta, 5)
    ch = TwoRayChannel(TwoRayLink(0.9, 0.75, 5), "frame-aligned")
    n0 = 2 * beta / 10 ** (ebn0_db / 10)
    rx = ch.transmit(blk, LinkRealization(np.full(n, l1), np.full(n, l2), 5), n0, rng)
    d = correlate_frames(rx)
    r = d.mean() ** 2 / (2 * d.var())
    gamma_hat = 2 * r + math.sqrt(4 * r * r + 2 * beta * r)
    gamma = (l1 * l1 + l2 * l2) * 10 ** (ebn0_db / 10)
    assert gamma_hat == pytest.approx(gamma, rel=0.05)
