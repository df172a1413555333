"""Relay-pair selection: exhaustive, greedy, random and the fixed schedule.

Every selector works on a :class:`~bufdstc.link_quality.LinkQualityTable`
and a buffer view offering ``can_receive(l)`` and ``can_transmit(l)``. A
source-relay entry is feasible when both relays of the pair can receive;
a relay-destination entry when both hold at least one packet. When the best
entry is infeasible it is dropped and the next best is tried; if nothing is
feasible the decision is idle.

Ties are broken by the lowest pair ``(m, n)``, then source-relay before
relay-destination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .link_quality import PHASE_ORDER, LinkQualityTable, Phase, all_pairs

__all__ = [
    "PairDecision",
    "BaseRelayState",
    "feasible",
    "select_exhaustive",
    "select_greedy",
    "select_random",
    "no_selection_schedule",
    "STRATEGIES",
    "complexity_counts",
]

STRATEGIES = ("exhaustive", "greedy", "random", "none")
BOTH_PHASES = (Phase.SOURCE_RELAY, Phase.RELAY_DEST)


@dataclass(frozen=True)
class PairDecision:
    pair: tuple | None
    phase: Phase | None
    sinr: float = 0.0
    fallbacks_taken: int = 0
    candidates_examined: int = 0

    @property
    def idle(self) -> bool:
        return self.pair is None


@dataclass
class BaseRelayState:
    """Greedy bookkeeping: the current base relay and the links already dropped."""

    base: int | None = None
    excluded: set = None

    def __post_init__(self):
        if self.excluded is None:
            self.excluded = set()


def feasible(buffers, phase: Phase, pair) -> bool:
    m, n = pair
    if phase is Phase.SOURCE_RELAY:
        return buffers.can_receive(m) and buffers.can_receive(n)
    return buffers.can_transmit(m) and buffers.can_transmit(n)


def _sort_key(entry):
    value, phase, pair = entry
    return (-value, pair, PHASE_ORDER[phase])


def _first_feasible(entries, buffers):
    for i, (value, phase, pair) in enumerate(sorted(entries, key=_sort_key)):
        if feasible(buffers, phase, pair):
            return i, value, phase, pair
    return len(entries), None, None, None


def select_exhaustive(table: LinkQualityTable, buffers, phases=BOTH_PHASES) -> PairDecision:
    """Best feasible (pair, phase) over every relay pair.

    All ``L(L-1)/2`` pairs are examined in each allowed phase; infeasible
    maxima are dropped in decreasing SINR order.
    """
    phases = tuple(Phase(p) for p in phases)
    pairs = all_pairs(table.relays)
    entries = [(table.pair(ph, m, n), ph, (m, n)) for (m, n) in pairs for ph in phases]
    dropped, value, phase, pair = _first_feasible(entries, buffers)
    if pair is None:
        return PairDecision(None, None, 0.0, dropped, len(pairs))
    return PairDecision(pair, phase, value, dropped, len(pairs))


def select_greedy(table: LinkQualityTable, buffers, phases=BOTH_PHASES, state: BaseRelayState | None = None) -> PairDecision:
    """Stage-wise pair search around the strongest single link.

    Stage ``s`` takes the relay ``q`` with the highest remaining single-link
    SINR as base and evaluates the pairs ``(p, q)`` with relays not used as a
    base before. The best feasible entry among them wins; if none is
    feasible the base is reset to the next strongest link. At most
    ``(L-1) + (L-2) + ... + 1 = L(L-1)/2`` pairs are evaluated.
    """
    phases = tuple(Phase(p) for p in phases)
    L = table.relays
    if state is None:
        state = BaseRelayState()
    links = [(float(table.single(ph)[p]), ph, p) for ph in phases for p in range(L)]
    links.sort(key=lambda t: (-t[0], t[2], PHASE_ORDER[t[1]]))
    used_bases: list[int] = []
    examined = 0
    dropped = 0
    for value, ph, q in links:
        if (ph, q) in state.excluded:
            continue
        if q in used_bases:
            # this relay's pairs were all evaluated in an earlier stage
            state.excluded.add((ph, q))
            continue
        state.base = q
        partners = [p for p in range(L) if p != q and p not in used_bases]
        examined += len(partners)
        entries = []
        for p in partners:
            pair = (min(p, q), max(p, q))
            for phase in phases:
                entries.append((table.pair(phase, *pair), phase, pair))
        n_dropped, best, phase, pair = _first_feasible(entries, buffers)
        dropped += n_dropped
        if pair is not None:
            return PairDecision(pair, phase, best, dropped, examined)
        state.excluded.add((ph, q))
        used_bases.append(q)
    state.base = None
    return PairDecision(None, None, 0.0, dropped, examined)


def select_random(table: LinkQualityTable, buffers, rng: np.random.Generator, phases=BOTH_PHASES) -> PairDecision:
    """Uniform choice among the feasible (pair, phase) entries; no SINR comparison."""
    phases = tuple(Phase(p) for p in phases)
    options = [(pair, ph) for pair in all_pairs(table.relays) for ph in phases if feasible(buffers, ph, pair)]
    if not options:
        return PairDecision(None, None, 0.0, 0, 0)
    pair, phase = options[int(rng.integers(len(options)))]
    return PairDecision(pair, phase, table.pair(phase, *pair), 0, 0)


def no_selection_schedule(L: int):
    """Fixed consecutive pairs ``(0, 1), (2, 3), ...`` used when nothing is selected."""
    if L < 2 or L % 2:
        raise ConfigurationError(f"the fixed pairing needs an even number of relays, got {L}")
    return [(l, l + 1) for l in range(0, L, 2)]


def complexity_counts(K: int, N: int, L: int, J: int = 1) -> dict:
    """Worst-case multiplication and addition counts per selection epoch.

    Returns ``{task: (multiplications, additions)}`` for the exhaustive and
    greedy searches, LS channel estimation and RAKE filter computation.

    >>> complexity_counts(3, 16, 6)["greedy"]
    (34272, 10633)
    """
    KN = K * N
    return {
        "exhaustive": (7 * KN * L**3 - 7 * KN * L**2, (2 * KN + K) * L**3 + 2 * L - (2 * KN + K + 2) * L**2),
        "greedy": (21 * KN * L**2 - 7 * KN * L, 6 * KN * L**2 + 3 * K * L**2 - 3 * K * L - L + 1),
        "channel_estimation": ((2 * N + 1) * K * L, (2 * N - 1) * K * L),
        "rake_filter": (4 * N * J, (4 * N - 2) * J),
    }
