
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bufdstc.buffers import BufferBank, BufferEntry
from bufdstc.errors import ConfigurationError
from bufdstc.link_quality import LinkQualityTable, Phase, all_pairs, build_table
from bufdstc.selection import (
    BaseRelayState,
    complexity_counts,
    feasible,
    no_selection_schedule,
    select_exhaustive,
    select_greedy,
    select_random,
)
from bufdstc.signal_model import draw_channels, generate_codes


class Open:
    """Every relay can both receive and transmit."""

    def can_receive(self, l):
        return True

    def can_transmit(self, l):
        return True


def random_table(rng, L=6):
    pairs = all_pairs(L)
    return LinkQualityTable.from_values(
        {p: rng.exponential() for p in pairs},
        {p: rng.exponential() for p in pairs},
        single_sr=rng.exponential(size=L),
        single_rd=rng.exponential(size=L),
        L=L,
    )


def channel_table(seed, L=6, s2=0.1, eager=True):
    codes = generate_codes(3, 16, seed=seed)
    sr, rd = draw_channels(3, L, seed=seed).signatures(codes)
    return build_table(sr, rd, s2, relay_detector="mmse", dest_detector="rake", eager=eager)


def test_exhaustive_empty_buffers_picks_source_relay():
    t = LinkQualityTable.from_values({(0, 1): 3.0}, {(0, 1): 2.5}, L=2)
    d = select_exhaustive(t, BufferBank(2, 2))
    assert d.pair == (0, 1) and d.phase is Phase.SOURCE_RELAY and d.sinr == 3.0


def test_exhaustive_full_buffers_picks_relay_dest():
    t = LinkQualityTable.from_values({(0, 1): 3.0}, {(0, 1): 2.5}, L=2)
    d = select_exhaustive(t, BufferBank(2, 2).fill(2))
    assert d.pair == (0, 1) and d.phase is Phase.RELAY_DEST and d.sinr == 2.5
    assert d.fallbacks_taken == 1


def test_exhaustive_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        t = random_table(rng)
        bank = BufferBank(6, 4).fill(2)
        d = select_exhaustive(t, bank)
        best = max(((t.pair(ph, *p), p, ph) for p in all_pairs(6) for ph in (Phase.SOURCE_RELAY, Phase.RELAY_DEST)),
                   key=lambda e: e[0])
        assert (d.sinr, d.pair, d.phase) == best


def test_exhaustive_skips_infeasible_in_order():
    t = LinkQualityTable.from_values({(0, 1): 9.0, (0, 2): 1.0, (1, 2): 5.0}, {(0, 1): 8.0, (0, 2): 7.0, (1, 2): 0.5}, L=3)
    bank = BufferBank(3, 2)
    bank[0].resize(1)
    bank.fill([1, 0, 1])
    # SR(0,1) blocked by full relay 0, RD(0,1) blocked by empty relay 1,
    # RD(0,2) feasible
    d = select_exhaustive(t, bank)
    assert (d.pair, d.phase, d.fallbacks_taken) == ((0, 2), Phase.RELAY_DEST, 2)


def test_exhaustive_idle_when_nothing_feasible():
    t = LinkQualityTable.from_values({(0, 1): 1.0}, {(0, 1): 1.0}, L=2)
    bank = BufferBank(2, 1)
    bank.fill([1, 0])
    d = select_exhaustive(t, bank)
    assert d.idle and d.phase is None


def test_tie_break_lowest_pair_then_source_relay():
    t = LinkQualityTable.from_values({(0, 2): 1.0, (0, 1): 1.0}, {(0, 1): 1.0}, L=3)
    d = select_exhaustive(t, Open())
    assert d.pair == (0, 1) and d.phase is Phase.SOURCE_RELAY


def test_greedy_base_and_candidates():
    t = LinkQualityTable.from_values(
        {(0, 1): 1.0, (1, 2): 2.0, (0, 2): 50.0},
        {(0, 1): 0.1, (1, 2): 0.1, (0, 2): 0.1},
        single_sr=[0.5, 2.0, 1.0],
        single_rd=[0.1, 0.1, 0.1],
        L=3,
    )
    state = BaseRelayState()
    d = select_greedy(t, Open(), state=state)
    # the strong pair (0, 2) does not contain the base relay
    assert state.base == 1
    assert d.pair == (1, 2) and d.sinr == 2.0
    assert d.candidates_examined == 2


def test_greedy_resets_base_when_exhausted():
    t = LinkQualityTable.from_values(
        {(0, 1): 1.0, (1, 2): 2.0, (0, 2): 50.0},
        {(0, 1): 0.1, (1, 2): 0.1, (0, 2): 0.1},
        single_sr=[0.5, 2.0, 1.0],
        single_rd=[0.1, 0.1, 0.1],
        L=3,
    )
    # relay 1 is full, relays 0 and 2 are empty: no pair with base 1 works
    bank = BufferBank(3, 1)
    bank[1].push(BufferEntry(0))
    state = BaseRelayState()
    d = select_greedy(t, bank, state=state)
    assert state.base == 2
    assert (Phase.SOURCE_RELAY, 1) in state.excluded
    assert d.pair == (0, 2) and d.phase is Phase.SOURCE_RELAY
    assert d.candidates_examined == 3


def test_greedy_idle_when_every_base_fails():
    t = LinkQualityTable.from_values({(0, 1): 1.0}, {(0, 1): 1.0}, single_sr=[1, 2], single_rd=[0, 0], L=2)
    bank = BufferBank(2, 1).fill([1, 0])
    d = select_greedy(t, bank)
    assert d.idle and d.candidates_examined == 1


def test_greedy_falls_back_within_base():
    t = LinkQualityTable.from_values(
        {(0, 1): 3.0, (1, 2): 2.0, (0, 2): 9.0},
        {(0, 1): 0.1, (1, 2): 0.1, (0, 2): 0.1},
        single_sr=[0.5, 2.0, 1.0],
        single_rd=[0.1, 0.1, 0.1],
        L=3,
    )
    bank = BufferBank(3, 1)
    bank[0].push(BufferEntry(0))
    d = select_greedy(t, bank)
    assert d.pair == (1, 2) and d.phase is Phase.SOURCE_RELAY
    assert d.fallbacks_taken >= 1


def test_greedy_bounded_by_exhaustive():
    for seed in range(1000):
        t = channel_table(seed)
        de = select_exhaustive(t, Open())
        dg = select_greedy(t, Open())
        assert dg.sinr <= de.sinr
        if t.single(Phase.SOURCE_RELAY).max() >= t.single(Phase.RELAY_DEST).max():
            best = int(np.argmax(t.single(Phase.SOURCE_RELAY)))
        else:
            best = int(np.argmax(t.single(Phase.RELAY_DEST)))
        if best in de.pair:
            assert dg.sinr == de.sinr


@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
@settings(max_examples=60, deadline=None)
def test_greedy_examination_bound(seed, L):
    rng = np.random.default_rng(seed)
    t = random_table(rng, L)
    bank = BufferBank(L, 2).fill(rng.integers(0, 3, size=L))
    d = select_greedy(t, bank)
    assert d.candidates_examined <= L * (L - 1) // 2
    if not d.idle:
        assert feasible(bank, d.phase, d.pair)
        assert d.sinr == t.pair(d.phase, *d.pair)


@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
@settings(max_examples=60, deadline=None)
def test_exhaustive_feasible_and_optimal(seed, L):
    rng = np.random.default_rng(seed)
    t = random_table(rng, L)
    bank = BufferBank(L, 2).fill(rng.integers(0, 3, size=L))
    d = select_exhaustive(t, bank)
    options = [t.pair(ph, *p) for p in all_pairs(L) for ph in (Phase.SOURCE_RELAY, Phase.RELAY_DEST) if feasible(bank, ph, p)]
    if d.idle:
        assert not options
    else:
        assert feasible(bank, d.phase, d.pair)
        assert d.sinr == max(options)
        assert d.candidates_examined == L * (L - 1) // 2


def test_deterministic_decisions():
    t = channel_table(5)
    assert select_exhaustive(t, Open()) == select_exhaustive(t, Open())
    assert select_greedy(t, Open()) == select_greedy(t, Open())


def test_random_single_feasible_pair():
    t = LinkQualityTable.from_values({(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0}, {}, L=3)
    bank = BufferBank(3, 1)
    bank[2].push(BufferEntry(0))
    d = select_random(t, bank, np.random.default_rng(0), phases=(Phase.SOURCE_RELAY,))
    assert d.pair == (0, 1)


def test_random_idle():
    t = LinkQualityTable.from_values({(0, 1): 1.0}, {(0, 1): 1.0}, L=2)
    bank = BufferBank(2, 1).fill([1, 0])
    assert select_random(t, bank, np.random.default_rng(0)).idle


def test_random_uniform_frequencies():
    scipy_stats = pytest.importorskip("scipy.stats")
    t = random_table(np.random.default_rng(1), 4)
    rng = np.random.default_rng(2)
    counts = {}
    for _ in range(10**4):
        d = select_random(t, Open(), rng)
        counts[(d.pair, d.phase)] = counts.get((d.pair, d.phase), 0) + 1
    assert len(counts) == 12
    assert scipy_stats.chisquare(list(counts.values())).pvalue > 0.05


def test_no_selection_schedule():
    assert no_selection_schedule(6) == [(0, 1), (2, 3), (4, 5)]
    assert no_selection_schedule(2) == [(0, 1)]
    with pytest.raises(ConfigurationError):
        no_selection_schedule(5)


def test_complexity_formulas():
    c = complexity_counts(3, 16, 6, J=6)
    KN = 48
    assert c["exhaustive"] == (7 * KN * 216 - 7 * KN * 36, (2 * KN + 3) * 216 + 12 - (2 * KN + 5) * 36)
    assert c["channel_estimation"] == (33 * 18, 31 * 18)
    assert c["rake_filter"] == (64 * 6, 62 * 6)
    # greedy is cheaper for every relay count of interest
    for L in range(4, 20):
        g, e = complexity_counts(3, 16, L)["greedy"], complexity_counts(3, 16, L)["exhaustive"]
        assert g[0] < e[0]
