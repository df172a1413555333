"""Single-link and relay-pair SINR metrics used by the selection algorithms.

For every link ``(k, l)`` of a hop the metric uses the scalar correlation
``rho = h^H h`` and the receive filter ``w`` of that link. Summed over users
and relays, with ``e_l = sum_k rho_kl ||w_kl||^2`` and
``z_l = sigma^2 sum_k ||w_kl||^2``:

* pair ``(m, n)``: ``(e_m + e_n) / (sum_{l not in {m,n}} e_l + z_m + z_n)``
* single relay ``p``: ``e_p / (sum_{l != p} e_l + z_p)``

Signals reaching or leaving relays outside the pair count as interference.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InvalidPairError, ModelError
from .receivers import mmse_filters, rake_filters

__all__ = [
    "Phase",
    "hop_filters",
    "link_terms",
    "pair_sinr_source_relay",
    "pair_sinr_relay_dest",
    "single_link_sinrs",
    "LinkQualityTable",
    "build_table",
    "all_pairs",
]


class Phase(str, enum.Enum):
    SOURCE_RELAY = "sr"
    RELAY_DEST = "rd"


PHASE_ORDER = {Phase.SOURCE_RELAY: 0, Phase.RELAY_DEST: 1}


def all_pairs(L: int):
    """Unordered relay pairs ``(m, n)`` with ``m < n`` in lexicographic order."""
    return list(itertools.combinations(range(L), 2))


def hop_filters(signatures: np.ndarray, detector: str, noise_var: float) -> np.ndarray:
    """Receive filters for every link of a hop, shape ``(L, N, K)``.

    ``detector`` is ``"rake"`` or ``"mmse"``. The relay option ``"perfect"``
    and the destination option ``"ml"`` have no linear filter of their own;
    their metrics use matched filters.
    """
    if detector in ("rake", "perfect", "ml"):
        return rake_filters(signatures)
    if detector == "mmse":
        return mmse_filters(signatures, noise_var)
    raise ConfigurationError(f"unknown detector {detector!r}")


def link_terms(signatures: np.ndarray, filters: np.ndarray, noise_var: float):
    """Per-relay signal terms ``e_l`` and noise terms ``z_l`` of one hop."""
    signatures = np.asarray(signatures)
    filters = np.asarray(filters)
    if signatures.shape != filters.shape or signatures.ndim != 3:
        raise ModelError(f"signatures {signatures.shape} and filters {filters.shape} must both be (L, N, K)")
    rho = np.sum(np.abs(signatures) ** 2, axis=1)  # (L, K)
    w2 = np.sum(np.abs(filters) ** 2, axis=1)
    e = np.sum(rho * w2, axis=1)
    z = noise_var * np.sum(w2, axis=1)
    return e, z


def _ratio(num: float, den: float) -> float:
    if den <= 0.0:
        return 0.0
    return float(num / den)


def _pair_value(e: np.ndarray, z: np.ndarray, m: int, n: int) -> float:
    # summed directly rather than as total - e_m - e_n to avoid cancellation
    others = math.fsum(e[l] for l in range(e.size) if l != m and l != n)
    return _ratio(e[m] + e[n], others + z[m] + z[n])


def _check_pair(pair, L: int):
    m, n = pair
    if m == n:
        raise InvalidPairError(f"relay pair needs two distinct relays, got ({m}, {n})")
    if not (0 <= m < L and 0 <= n < L):
        raise InvalidPairError(f"pair ({m}, {n}) outside 0..{L - 1}")
    return m, n


def pair_sinr_source_relay(signatures, filters, pair, noise_var: float) -> float:
    """SINR of the combined paths from all users to relays ``pair``."""
    e, z = link_terms(signatures, filters, noise_var)
    m, n = _check_pair(pair, e.size)
    return _pair_value(e, z, m, n)


def pair_sinr_relay_dest(signatures, filters, pair, noise_var: float) -> float:
    """SINR of the combined paths from relays ``pair`` to the destination."""
    e, z = link_terms(signatures, filters, noise_var)
    m, n = _check_pair(pair, e.size)
    return _pair_value(e, z, m, n)


def _singles(e, z):
    out = np.empty(e.size)
    for p in range(e.size):
        others = math.fsum(e[l] for l in range(e.size) if l != p)
        out[p] = _ratio(e[p], others + z[p])
    return out


def single_link_sinrs(sr_signatures, sr_filters, rd_signatures, rd_filters, noise_var: float):
    """SINR of every single source-relay and relay-destination link.

    Returns two length-``L`` arrays ``(single_sr, single_rd)``.
    """
    e_sr, z_sr = link_terms(sr_signatures, sr_filters, noise_var)
    e_rd, z_rd = link_terms(rd_signatures, rd_filters, noise_var)
    return _singles(e_sr, z_sr), _singles(e_rd, z_rd)


@dataclass
class LinkQualityTable:
    """All SINR metrics of one epoch.

    Pair entries are computed on first access and cached; ``evaluations``
    counts how many pair SINRs (per phase) have been computed, which is what
    the complexity counters report.
    """

    e_sr: np.ndarray
    z_sr: np.ndarray
    e_rd: np.ndarray
    z_rd: np.ndarray
    epoch: int = 0
    evaluations: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.single_sr = _singles(self.e_sr, self.z_sr)
        self.single_rd = _singles(self.e_rd, self.z_rd)

    @property
    def relays(self) -> int:
        return self.e_sr.size

    def single(self, phase: Phase) -> np.ndarray:
        return self.single_sr if Phase(phase) is Phase.SOURCE_RELAY else self.single_rd

    def pair(self, phase, m: int, n: int) -> float:
        phase = Phase(phase)
        m, n = _check_pair((m, n), self.relays)
        key = (phase, min(m, n), max(m, n))
        value = self._cache.get(key)
        if value is None:
            if phase is Phase.SOURCE_RELAY:
                value = _pair_value(self.e_sr, self.z_sr, m, n)
            else:
                value = _pair_value(self.e_rd, self.z_rd, m, n)
            self._cache[key] = value
            self.evaluations += 1
        return value

    def evaluate_all(self):
        for m, n in all_pairs(self.relays):
            self.pair(Phase.SOURCE_RELAY, m, n)
            self.pair(Phase.RELAY_DEST, m, n)
        return self

    @property
    def pair_sr(self) -> dict:
        return {(m, n): self.pair(Phase.SOURCE_RELAY, m, n) for m, n in all_pairs(self.relays)}

    @property
    def pair_rd(self) -> dict:
        return {(m, n): self.pair(Phase.RELAY_DEST, m, n) for m, n in all_pairs(self.relays)}

    @classmethod
    def from_values(cls, pair_sr: dict, pair_rd: dict, single_sr=None, single_rd=None, L=None):
        """Table with prescribed SINR values (mostly for tests and what-if runs)."""
        if L is None:
            L = 1 + max(max(p) for p in list(pair_sr) + list(pair_rd))
        zeros = np.zeros(L)
        table = cls(zeros, zeros.copy(), zeros.copy(), zeros.copy())
        for (m, n), v in pair_sr.items():
            table._cache[(Phase.SOURCE_RELAY, min(m, n), max(m, n))] = float(v)
        for (m, n), v in pair_rd.items():
            table._cache[(Phase.RELAY_DEST, min(m, n), max(m, n))] = float(v)
        for m, n in all_pairs(L):
            table._cache.setdefault((Phase.SOURCE_RELAY, m, n), 0.0)
            table._cache.setdefault((Phase.RELAY_DEST, m, n), 0.0)
        if single_sr is not None:
            table.single_sr = np.asarray(single_sr, dtype=float)
        if single_rd is not None:
            table.single_rd = np.asarray(single_rd, dtype=float)
        return table


def build_table(
    sr_signatures,
    rd_signatures,
    noise_var: float,
    relay_detector: str = "rake",
    dest_detector: str = "rake",
    eager: bool = True,
    epoch: int = 0,
    sr_filters=None,
    rd_filters=None,
) -> LinkQualityTable:
    """Compute the link-quality table of one channel realization.

    Filters are built from the detector choices unless passed explicitly.
    With ``eager=True`` all ``L(L-1)/2`` pair SINRs of both phases are
    evaluated up front (exhaustive search); otherwise they are computed on
    demand, so the evaluation counter reflects what a search actually used.
    """
    if sr_filters is None:
        sr_filters = hop_filters(sr_signatures, relay_detector, noise_var)
    if rd_filters is None:
        rd_filters = hop_filters(rd_signatures, dest_detector, noise_var)
    e_sr, z_sr = link_terms(sr_signatures, sr_filters, noise_var)
    e_rd, z_rd = link_terms(rd_signatures, rd_filters, noise_var)
    table = LinkQualityTable(e_sr, z_sr, e_rd, z_rd, epoch=epoch)
    if eager:
        table.evaluate_all()
    return table
