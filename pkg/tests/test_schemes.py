import itertools
import math

import numpy as np
import pytest

from dcsk_relay import AWGN_LINK, Scenario, Scheme, TwoRayChannel, TwoRayLink, chaos
from dcsk_relay import schemes
from dcsk_relay.channel import LinkRealization
from dcsk_relay.modem import correlate_frames, detect_binary, modulate_block
from dcsk_relay.schemes import (
    RelayNetwork,
    demap_at_user,
    map_network,
    map_ternary,
    relay_op_counts,
    simulate_block,
    slot_and_bandwidth,
)

from conftest import TABLE4

PAIRS = list(itertools.product([1, -1], repeat=2))


def _unit(scheme, beta=32, **kw):
    return Scenario(scheme, beta, AWGN_LINK, AWGN_LINK, AWGN_LINK, **kw)


def test_scheme_parse():
    assert Scheme.parse("scheme2") is Scheme.TIME_MUX2
    assert Scheme.parse("freq-mux3") is Scheme.FREQ_MUX3
    assert Scheme.parse(Scheme.ANC) is Scheme.ANC
    with pytest.raises(ValueError, match="unknown scheme"):
        Scheme.parse("OFDM")


def test_map_network_table():
    assert [map_network(a, b) for a, b in PAIRS] == [1, -1, -1, 1]
    with pytest.raises(ValueError):
        map_network(0, 1)


def test_map_ternary_table():
    assert (map_ternary(2), map_ternary(0), map_ternary(-2)) == (1, -1, 1)
    with pytest.raises(ValueError):
        map_ternary(1)


def test_demap_examples():
    assert demap_at_user(-1, 1) == -1
    assert demap_at_user(-1, -1) == 1
    assert demap_at_user(1, 1) == 1


@pytest.mark.parametrize("a, b", PAIRS)
def test_demap_inverts_network_map(a, b):
    assert demap_at_user(map_network(a, b), b) == a
    assert demap_at_user(map_network(a, b), a) == b
    assert demap_at_user(map_network(a, b), b) == map_network(a, b) * b


@pytest.mark.parametrize("a, b", PAIRS)
def test_table_one_rows(a, b):
    # superposition level (in units of the reference energy) -> relay symbol
    level = {2: 2, 0: 0, -2: -2}[a + b]
    mapped = map_ternary(level)
    assert mapped == map_network(a, b)
    assert demap_at_user(mapped, b) == a


def test_slot_and_bandwidth():
    assert slot_and_bandwidth("TimeMux2", 50) == (3, 300, 1)
    assert slot_and_bandwidth("FreqMux3", 50) == (2, 200, 2)
    assert slot_and_bandwidth("PNC1", 100) == (2, 400, 1)
    assert slot_and_bandwidth("ANC", 25) == (2, 100, 1)


def test_relay_op_counts():
    assert relay_op_counts("PNC1", 100) == (100, 100, 100)
    assert relay_op_counts("TimeMux2", 100) == (200, 100, 100)
    assert relay_op_counts("FreqMux3", 100) == (200, 100, 100)
    assert relay_op_counts("ANC", 100) == (0, 0, 0)
    for s in Scheme:
        assert relay_op_counts(s, 0) == (0, 0, 0)
    with pytest.raises(ValueError):
        relay_op_counts("PNC1", -1)


def test_scenario_validation():
    a, b, c = TABLE4[25]
    with pytest.raises(ValueError, match="beta"):
        Scenario("PNC1", 4, a, b, c)
    with pytest.raises(ValueError, match="hop1_b"):
        Scenario("PNC1", 16, a, b, c)  # tau_B = 8 is not < beta/2
    with pytest.raises(ValueError, match="genie"):
        Scenario("ANC", 25, a, b, c, genie_remove_strong_isi=True)
    with pytest.raises(ValueError):
        Scenario("PNC1", 25, a, b, c, threshold_policy="adaptive")
    with pytest.raises(ValueError):
        Scenario("PNC1", 25, a, b, c, delay_model="ideal")
    with pytest.raises(ValueError):
        Scenario("PNC1", 25, a, b, c, threshold=-1.0)
    sc = Scenario("PNC1", 25, a, b, c, genie_remove_strong_isi=True, ebn0_db=10)
    assert sc.eb == 50 and sc.n0 == pytest.approx(5.0)
    assert sc.pad == 8
    assert sc.with_scheme("TimeMux2").genie_remove_strong_isi is False
    assert _unit("PNC1").n0 == 0.0


def test_with_special_case():
    a, b, c = TABLE4[25]
    sc = Scenario("TimeMux2", 25, a, b, c)
    assert sc.with_special_case("none") is sc
    assert sc.with_special_case("a_low").hop1_a == AWGN_LINK
    low_b = sc.with_special_case("b_low")
    assert (low_b.hop1_a, low_b.hop1_b, low_b.hop2_b) == (a, AWGN_LINK, AWGN_LINK)
    with pytest.raises(ValueError):
        sc.with_special_case("c_low")


@pytest.mark.parametrize("scheme", list(Scheme))
@pytest.mark.parametrize("a, b", PAIRS)
def test_noiseless_unit_gain_all_schemes(scheme, a, b, rng):
    sc = _unit(scheme, simulate_a_side=True)
    net = RelayNetwork.build(sc, rng)
    out = schemes.run_frames(sc, net, np.array([a]), np.array([b]), rng)
    assert out.recovered_a_at_b.tolist() == [a]
    assert out.recovered_b_at_a.tolist() == [b]


def test_single_frame_wrappers(rng):
    sc = _unit("PNC1")
    net = RelayNetwork.build(sc, rng)
    o = schemes.run_pnc_frame(sc, net, rng, 1, 1)
    assert (o.sent_a, o.recovered_a_at_b, o.relay_bits) == (1, 1, 1)
    # statistic: both users on the same reference -> 4 * sum(x^2) ~ 2 Eb
    assert o.relay_statistic == pytest.approx(2 * sc.eb, rel=0.3)
    o = schemes.run_pnc_frame(sc, net, rng, 1, -1)
    assert abs(o.relay_statistic) < 1e-9
    assert (o.relay_bits, o.recovered_a_at_b) == (-1, 1)
    o = schemes.run_mux_frame(_unit("TimeMux2"), RelayNetwork.build(_unit("TimeMux2"), rng), rng, -1, 1)
    assert o.recovered_a_at_b == -1
    o = schemes.run_anc_frame(_unit("ANC"), RelayNetwork.build(_unit("ANC"), rng), rng, 1, -1)
    assert o.recovered_a_at_b == 1
    with pytest.raises(ValueError):
        schemes.run_anc_frame(_unit("PNC1"), net, rng, 1, 1)


def test_anc_gain_halves_double_superposition(rng):
    rx = np.tile(2 * chaos.seed(rng).take(64), (100, 1))
    rx[:, 32:] = rx[:, :32]
    g = schemes._packet_gain(rx, 100)
    assert g[0] == pytest.approx(1 / math.sqrt(np.mean(rx[0] ** 2)))
    assert g[0] == pytest.approx(0.5, rel=0.3)
    parts = schemes._packet_gain(np.ones((250, 4)), 100)
    assert parts.shape == (250,) and np.all(parts == 1.0)


def test_mux_statistic_scales_with_gain(rng):
    link = TwoRayLink(0.36, 0.0, 0, fading="static")
    blk = modulate_block(np.array([1, -1]), chaos.seed(rng), 40)
    ch = TwoRayChannel(link, "frame-aligned")
    rx = ch.transmit(blk, ch.draw(rng, 2), 0.0, rng)
    e = np.sum(blk.reference**2, axis=1)
    np.testing.assert_allclose(correlate_frames(rx), 0.36 * np.array([1, -1]) * e, rtol=1e-12)
    assert detect_binary(correlate_frames(rx)).tolist() == [1, -1]


def test_scheme2_equals_scheme3_bitwise():
    a, b, c = TABLE4[25]
    out = {}
    for s in ("TimeMux2", "FreqMux3"):
        sc = Scenario(s, 25, a, b, c, ebn0_db=12.0, simulate_a_side=True)
        out[s] = simulate_block(sc, 5000, np.random.default_rng(99))
    x, y = out["TimeMux2"], out["FreqMux3"]
    assert np.array_equal(x.recovered_a_at_b, y.recovered_a_at_b)
    assert np.array_equal(x.recovered_b_at_a, y.recovered_b_at_a)
    assert np.array_equal(x.relay_bits, y.relay_bits)


def test_outcome_error_counting():
    o = schemes.FrameOutcome(np.array([1, -1, 1]), np.array([1, 1, -1]), np.array([1, 1, 1]),
                             relay_bits=np.array([1, -1, 1]))
    assert o.end_to_end_errors() == 1
    assert o.relay_errors() == 1
    with pytest.raises(ValueError):
        schemes.FrameOutcome(np.array([1]), np.array([1]), np.array([1])).relay_errors()


def test_shared_reference_streams(rng):
    sc = _unit("PNC1")
    net = RelayNetwork.build(sc, rng)
    assert net.user_a is net.user_b
    net2 = RelayNetwork.build(_unit("TimeMux2"), rng)
    assert net2.user_a is not net2.user_b


def test_genie_improves_pnc_relay():
    link_a = TwoRayLink(0.9, 0.75, 5)
    link_b = TwoRayLink(0.9, 0.75, 8)
    errs = {}
    for genie in (False, True):
        sc = Scenario("PNC1", 100, link_a, link_b, link_b, ebn0_db=30.0, genie_remove_strong_isi=genie)
        errs[genie] = simulate_block(sc, 20000, np.random.default_rng(5)).relay_errors()
    assert errs[True] * 3 < errs[False]


def test_fixed_threshold_policy_runs(rng):
    a, b, c = TABLE4[25]
    for s in ("PNC1", "ANC"):
        sc = Scenario(s, 25, a, b, c, ebn0_db=20.0, threshold_policy="fixed")
        o = simulate_block(sc, 2000, rng)
        assert 0 < o.end_to_end_errors() < 2000
    sc = _unit("PNC1", threshold_policy="fixed", threshold=10.0)
    o = simulate_block(sc, 100, rng)
    assert o.end_to_end_errors() == 0


def test_delay_line_model_runs(rng):
    a, b, c = TABLE4[25]
    for s in Scheme:
        sc = Scenario(s, 25, a, b, c, ebn0_db=15.0, delay_model="delay-line")
        o = simulate_block(sc, 1000, rng)
        assert o.recovered_a_at_b.shape == (1000,)
