import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bufdstc.errors import InvalidPairError
from bufdstc.link_quality import (
    LinkQualityTable,
    Phase,
    build_table,
    hop_filters,
    pair_sinr_relay_dest,
    pair_sinr_source_relay,
    single_link_sinrs,
)
from bufdstc.receivers import mmse_filters
from bufdstc.signal_model import draw_channels, generate_codes

from oracles import oracle_pair, oracle_single


def unit_sig(L):
    H = np.zeros((L, 4, 1), dtype=complex)
    H[:, 0, 0] = 1.0
    return H


def test_two_relay_unit_case():
    H = unit_sig(2)
    assert pair_sinr_source_relay(H, H, (0, 1), 1.0) == pytest.approx(1.0)
    assert pair_sinr_source_relay(H, H, (0, 1), 0.5) == pytest.approx(2.0)
    assert pair_sinr_relay_dest(H, H, (0, 1), 0.25) == pytest.approx(4.0)


def test_pair_symmetry(scenario):
    _, _, sr, rd = scenario
    for (m, n) in [(0, 1), (2, 5), (3, 4)]:
        assert pair_sinr_relay_dest(rd, rd, (m, n), 0.1) == pair_sinr_relay_dest(rd, rd, (n, m), 0.1)
        assert pair_sinr_source_relay(sr, sr, (m, n), 0.1) == pair_sinr_source_relay(sr, sr, (n, m), 0.1)


def test_invalid_pairs(scenario):
    _, _, sr, _ = scenario
    with pytest.raises(InvalidPairError):
        pair_sinr_source_relay(sr, sr, (2, 2), 0.1)
    with pytest.raises(InvalidPairError):
        pair_sinr_source_relay(sr, sr, (0, 6), 0.1)


def test_single_link_degenerate():
    H = unit_sig(1)
    s_sr, s_rd = single_link_sinrs(H, H, H, H, 0.2)
    assert s_sr[0] == pytest.approx(5.0)
    assert s_rd[0] == pytest.approx(5.0)


def test_interfering_relay_lowers_single_sinr():
    H = unit_sig(1)
    H2 = unit_sig(2)
    alone = single_link_sinrs(H, H, H, H, 0.5)[0][0]
    with_other = single_link_sinrs(H2, H2, H2, H2, 0.5)[0][0]
    assert with_other < alone


@pytest.mark.parametrize("detector", ["rake", "mmse"])
def test_matches_oracle_on_random_instances(detector):
    codes = generate_codes(3, 16, seed=1)
    for i in range(100):
        ch = draw_channels(3, 6, seed=100 + i)
        sr, rd = ch.signatures(codes)
        s2 = 10 ** (-(i % 20) / 10)
        Wsr = hop_filters(sr, detector, s2)
        Wrd = hop_filters(rd, detector, s2)
        t = build_table(sr, rd, s2, sr_filters=Wsr, rd_filters=Wrd)
        for (m, n), v in t.pair_sr.items():
            assert v == pytest.approx(oracle_pair(sr, Wsr, m, n, s2), rel=1e-12)
        for (m, n), v in t.pair_rd.items():
            assert v == pytest.approx(oracle_pair(rd, Wrd, m, n, s2), rel=1e-12)
        for p in range(6):
            assert t.single_sr[p] == pytest.approx(oracle_single(sr, Wsr, p, s2), rel=1e-12)
            assert t.single_rd[p] == pytest.approx(oracle_single(rd, Wrd, p, s2), rel=1e-12)


def test_zeroing_outside_relay_never_hurts(scenario):
    _, _, sr, _ = scenario
    W = mmse_filters(sr, 0.1)
    before = pair_sinr_source_relay(sr, W, (0, 1), 0.1)
    sr2 = sr.copy()
    sr2[4] = 0
    assert pair_sinr_source_relay(sr2, W, (0, 1), 0.1) >= before


@given(st.integers(0, 10**6), st.floats(1e-3, 10))
@settings(max_examples=40, deadline=None)
def test_non_negative_and_finite(seed, s2):
    codes = generate_codes(2, 8, seed=seed)
    sr, rd = draw_channels(2, 4, seed=seed).signatures(codes)
    t = build_table(sr, rd, s2, relay_detector="mmse", dest_detector="rake")
    values = list(t.pair_sr.values()) + list(t.pair_rd.values()) + list(t.single_sr) + list(t.single_rd)
    assert all(np.isfinite(v) and v >= 0 for v in values)


@pytest.mark.parametrize("L,pairs", [(6, 15), (4, 6), (2, 1)])
def test_table_entry_counts(L, pairs):
    codes = generate_codes(3, 16, seed=0)
    sr, rd = draw_channels(3, L, seed=0).signatures(codes)
    t = build_table(sr, rd, 0.1)
    assert len(t.pair_sr) == len(t.pair_rd) == pairs
    assert t.evaluations == 2 * pairs
    assert len(t.single_sr) == len(t.single_rd) == L


def test_lazy_table_counts_only_used_entries(scenario):
    _, _, sr, rd = scenario
    t = build_table(sr, rd, 0.1, eager=False)
    assert t.evaluations == 0
    t.pair(Phase.RELAY_DEST, 1, 3)
    t.pair(Phase.RELAY_DEST, 3, 1)
    assert t.evaluations == 1


def test_from_values_fills_missing_with_zero():
    t = LinkQualityTable.from_values({(0, 1): 3.0}, {(0, 1): 2.5}, L=3)
    assert t.pair("sr", 1, 0) == 3.0
    assert t.pair("rd", 1, 2) == 0.0


def test_filters_for_perfect_and_ml_are_matched(scenario):
    _, _, sr, _ = scenario
    np.testing.assert_array_equal(hop_filters(sr, "perfect", 0.1), sr)
    np.testing.assert_array_equal(hop_filters(sr, "ml", 0.1), sr)
