"""Queueing delay at the relay buffers: Little's-law model and trace statistics.

All times are in epochs (one epoch is one selection decision, i.e. two
symbol slots) and rates in buffer entries per epoch per relay.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, UndefinedDelayError

__all__ = ["DelayStats", "DelayTrace", "analytic_delay", "measure_delay", "link_success_rate"]


def analytic_delay(P_GJ: float, P_G0: float, P: float, J: int) -> float:
    """Average buffering delay ``J P_GJ / ((1 - P_GJ) P + P_G0 P)``.

    ``P_GJ`` and ``P_G0`` are the full and empty state probabilities and
    ``P`` the per-epoch transfer probability of a link.

    >>> round(analytic_delay(0.2, 0.1, 1.0, 4), 4)
    0.8889
    """
    for name, v in (("P_GJ", P_GJ), ("P_G0", P_G0), ("P", P)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    den = (1.0 - P_GJ) * P + P_G0 * P
    if den <= 0.0:
        raise UndefinedDelayError("arrival rate is zero, delay undefined")
    return J * P_GJ / den


def link_success_rate(R_a: float, R_d: float) -> float:
    """Transfer probability consistent with both rate expressions.

    With ``R_a = (1 - P_GJ) P + P_G0 P`` and ``R_d = (1 - P_G0) P + P_GJ P``
    the two rates sum to ``2P``.
    """
    return 0.5 * (R_a + R_d)


@dataclass
class DelayTrace:
    """Per-epoch buffer history of one run.

    Occupancy is sampled at the end of every epoch, so an entry pushed in
    epoch ``e`` and popped in epoch ``e + d`` is counted in exactly ``d``
    samples; this makes the sample averages obey Little's law exactly up to
    entries still queued at the end.
    """

    relays: int
    warmup: int = 0
    occupancy: list = field(default_factory=list)
    capacity: list = field(default_factory=list)
    arrivals: list = field(default_factory=list)
    departures: list = field(default_factory=list)
    sojourns: list = field(default_factory=list)

    @property
    def epochs(self) -> int:
        return len(self.occupancy)

    def record(self, occupancy, capacity, arrivals, departures, sojourns=()):
        """Append one epoch; ``sojourns`` are the stored times of entries popped in it."""
        self.occupancy.append(np.asarray(occupancy, dtype=int).copy())
        self.capacity.append(np.asarray(capacity, dtype=int).copy())
        self.arrivals.append(np.asarray(arrivals, dtype=int).copy())
        self.departures.append(np.asarray(departures, dtype=int).copy())
        self.sojourns.append(list(sojourns))


@dataclass
class DelayStats:
    P_G0: float
    P_GJ: float
    Q: float
    R_a: float
    R_d: float
    T_measured: float
    T_analytic: float | None
    J: float
    epochs: int
    delivered: int

    @property
    def P(self) -> float:
        return link_success_rate(self.R_a, self.R_d)

    @property
    def little_ratio(self) -> float:
        """``Q / R_a``, the delay Little's law predicts from the occupancy."""
        return self.Q / self.R_a if self.R_a > 0 else float("nan")


def measure_delay(trace: DelayTrace, warmup: int | None = None) -> DelayStats:
    """Empirical delay statistics pooled over relays, after the warm-up epochs.

    The analytic prediction uses the measured state probabilities, the mean
    capacity as ``J`` and ``P`` from :func:`link_success_rate`; it is ``None``
    when the measured arrival rate is zero.
    """
    warmup = trace.warmup if warmup is None else warmup
    if trace.epochs <= warmup:
        raise InsufficientDataError(f"trace has {trace.epochs} epochs, warm-up is {warmup}")
    occ = np.array(trace.occupancy[warmup:], dtype=float)
    cap = np.array(trace.capacity[warmup:], dtype=float)
    arr = np.array(trace.arrivals[warmup:], dtype=float)
    dep = np.array(trace.departures[warmup:], dtype=float)
    sojourns = [s for epoch in trace.sojourns[warmup:] for s in epoch]
    if not sojourns:
        raise InsufficientDataError("no entry left a buffer after the warm-up")
    P_G0 = float(np.mean(occ == 0))
    P_GJ = float(np.mean(occ >= cap))
    Q = float(occ.mean())
    R_a = float(arr.mean())
    R_d = float(dep.mean())
    J = float(cap.mean())
    P = link_success_rate(R_a, R_d)
    try:
        T_an = analytic_delay(P_GJ, P_G0, min(P, 1.0), J)
    except UndefinedDelayError:
        T_an = None
    return DelayStats(
        P_G0=P_G0,
        P_GJ=P_GJ,
        Q=Q,
        R_a=R_a,
        R_d=R_d,
        T_measured=float(np.mean(sojourns)),
        T_analytic=T_an,
        J=J,
        epochs=int(occ.shape[0]),
        delivered=len(sojourns),
    )
