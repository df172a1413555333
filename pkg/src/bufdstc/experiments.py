"""BER, buffer-size and delay experiments built on :class:`~bufdstc.simulation.Trial`."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .buffers import adapt_size_snr
from .config import SimConfig
from .delay import measure_delay
from .errors import InsufficientDataError
from .simulation import Trial

__all__ = [
    "PointResult",
    "ExperimentResult",
    "DelayComparison",
    "run_point",
    "run_ber_sweep",
    "run_buffer_size_sweep",
    "run_delay_experiment",
    "snr_buffer_sizes",
    "batch_means_se",
    "COLUMNS",
]

COLUMNS = (
    "snr_db",
    "ber",
    "avg_delay_epochs",
    "mean_buffer_size",
    "pairs_examined_mean",
    "idle_epoch_fraction",
    "symbols_counted",
)

BATCHES = 20


@dataclass
class PointResult:
    snr_db: float
    ber: float
    avg_delay_epochs: float
    mean_buffer_size: float
    pairs_examined_mean: float
    idle_epoch_fraction: float
    symbols_counted: int
    bit_errors: int = 0
    ber_se: float = float("nan")
    epochs: int = 0
    insufficient: bool = False
    delay_stats: object = field(default=None, repr=False)

    def row(self):
        return tuple(getattr(self, c) for c in COLUMNS)


@dataclass
class ExperimentResult:
    kind: str
    config: SimConfig
    rows: list
    parameter: str = "snr_db"
    values: list = field(default_factory=list)

    def column(self, name) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def __len__(self):
        return len(self.rows)


@dataclass
class DelayComparison:
    """Delay rows for the configured policy and for a fixed-size reference."""

    primary: ExperimentResult
    fixed: ExperimentResult


def batch_means_se(errors_bits, batches: int = BATCHES) -> float:
    """Standard error of the pooled BER from contiguous batches of epochs.

    Channel fading makes errors within an epoch strongly correlated, so the
    binomial formula would understate the spread.
    """
    if len(errors_bits) < 2:
        return float("nan")
    data = np.asarray(errors_bits, dtype=float)
    b = min(batches, len(data))
    groups = np.array_split(data, b)
    rates = np.array([g[:, 0].sum() / g[:, 1].sum() for g in groups])
    return float(rates.std(ddof=1) / math.sqrt(b))


def _point_tag(snr_db: float) -> int:
    return int(round((snr_db + 1000.0) * 1000.0))


def summarize(trial: Trial) -> PointResult:
    cfg = trial.config
    symbols = trial.delivered * cfg.M * cfg.K
    insufficient = trial.bits == 0
    ber = trial.bit_errors / trial.bits if trial.bits else float("nan")
    try:
        stats = measure_delay(trial.trace)
        delay = stats.T_measured
    except InsufficientDataError:
        stats = None
        delay = float("nan")
    examined = float(np.mean(trial.examined)) if trial.examined else 0.0
    return PointResult(
        snr_db=trial.snr_db,
        ber=ber,
        avg_delay_epochs=delay,
        mean_buffer_size=float(np.mean(trial.capacity_history)) if trial.capacity_history else float(trial.J),
        pairs_examined_mean=examined,
        idle_epoch_fraction=trial.idle_epochs / trial.epoch if trial.epoch else 0.0,
        symbols_counted=int(symbols),
        bit_errors=int(trial.bit_errors),
        ber_se=batch_means_se(trial.rd_errors),
        epochs=trial.epoch,
        insufficient=insufficient,
        delay_stats=stats,
    )


def run_point(config: SimConfig, snr_db: float, J: int | None = None, tag=None, packets: int | None = None) -> PointResult:
    """Simulate one operating point until ``packets`` packets are delivered."""
    tag = _point_tag(snr_db) if tag is None else tag
    packets = config.packets if packets is None else packets
    trial = Trial(config, snr_db, J=J, tag=tag).run(packets)
    return summarize(trial)


def snr_buffer_sizes(config: SimConfig, snrs) -> list[int]:
    """Buffer size at each sweep point.

    Under the SNR-driven policy the size starts at ``config.J`` on the first
    point and is adapted from one point to the next.
    """
    if config.buffer_mode != "snr":
        return [config.J] * len(snrs)
    policy = config.policy()
    sizes = []
    J = policy.clamp(config.J)
    prev = None
    for s in snrs:
        if prev is not None:
            J = adapt_size_snr(policy, J, prev, s)
        sizes.append(J)
        prev = s
    return sizes


def _run_many(jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [run_point(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_point, *job) for job in jobs]
        return [f.result() for f in futures]


def run_ber_sweep(config: SimConfig, workers: int = 1) -> ExperimentResult:
    """One row per SNR point of ``config``."""
    snrs = config.snr_points()
    sizes = snr_buffer_sizes(config, snrs)
    jobs = [(config, s, J, _point_tag(s), config.packets) for s, J in zip(snrs, sizes)]
    rows = _run_many(jobs, workers)
    return ExperimentResult("ber", config, rows, "snr_db", list(snrs))


def run_buffer_size_sweep(config: SimConfig, sizes, snr_db: float | None = None, workers: int = 1) -> ExperimentResult:
    """One row per buffer size at a fixed SNR, all sizes sharing one random tag."""
    snr = config.snr_min if snr_db is None else snr_db
    fixed = config.replace(buffer_mode="fixed")
    tag = _point_tag(snr)
    jobs = [(fixed.replace(J=int(J), J_max=max(fixed.J_max, int(J))), snr, int(J), tag, config.packets) for J in sizes]
    rows = _run_many(jobs, workers)
    return ExperimentResult("bufsize", fixed, rows, "J", [int(J) for J in sizes])


def _delay_rows(config: SimConfig, snr: float, J: int, counts) -> list:
    rows = []
    cfg = config
    for P in counts:
        P = int(P)
        if P <= 0:
            rows.append(PointResult(snr, float("nan"), 0.0, float(J), 0.0, 0.0, 0))
            continue
        trial = Trial(cfg, snr, J=J, tag=_point_tag(snr)).run_until_first(P)
        latencies = [trial.delivery_epoch[j] + 1 for j in range(P) if j in trial.delivery_epoch]
        row = summarize(trial)
        row.avg_delay_epochs = float(np.mean(latencies)) if latencies else float("nan")
        row.symbols_counted = len(latencies) * cfg.M * cfg.K
        row.insufficient = len(latencies) < P
        rows.append(row)
    return rows


def run_delay_experiment(config: SimConfig, packet_counts, snr_db: float | None = None, fixed_J: int = 8) -> DelayComparison:
    """Mean latency of the first ``P`` source packets for every ``P`` in ``packet_counts``.

    Latency runs from the start of the simulation to the epoch in which a
    packet reaches the destination, so it includes the time the source waits
    for the relays. The configured buffer policy is compared with a fixed
    buffer of ``fixed_J`` entries on the same random streams.
    """
    snr = config.snr_max if snr_db is None else snr_db
    J = snr_buffer_sizes(config, [config.snr_min, snr])[-1] if config.buffer_mode == "snr" else config.J
    primary = _delay_rows(config, snr, J, packet_counts)
    ref_cfg = config.replace(buffer_mode="fixed", J=fixed_J, J_max=max(config.J_max, fixed_J))
    fixed = _delay_rows(ref_cfg, snr, fixed_J, packet_counts)
    counts = [int(p) for p in packet_counts]
    return DelayComparison(
        ExperimentResult("delay", config, primary, "packets", counts),
        ExperimentResult("delay", ref_cfg, fixed, "packets", counts),
    )
