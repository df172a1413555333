"""Epoch-by-epoch simulation of one operating point.

An epoch is one selection decision. Every epoch draws a fresh channel
realization; what happens next depends on the scheme:

``buffered``
    The selector picks a relay pair and a phase. In a source-relay epoch the
    source sends a new packet pair (two slots of ``M`` symbols per user) and
    both relays store their decisions. In a relay-destination epoch both
    relays pop their oldest entry and send one half of it each as a
    distributed Alamouti block.

``nonbuffered``
    Epochs alternate. Every relay decodes the broadcast packet pair, then
    a relay-destination pair is chosen (by SINR or at random) and forwards it.

selection ``none``
    Fixed consecutive pairs. The source serves the pairs round-robin, one per
    epoch, after which all pairs forward at once and interfere with each
    other.

A packet pair is stored by two relays. Each copy delivers exactly one of
the two halves, so every source packet reaches the destination once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .buffers import BufferBank, BufferEntry, adapt_size_power
from .config import SimConfig
from .delay import DelayTrace
from .dstc import multiuser_stacked_channel, stack_observation, transmit_dstc_multiuser
from .estimation import estimate_realization
from .link_quality import Phase, build_table, hop_filters
from .receivers import covariance_filters, ml_joint_detect, slicer
from .selection import (
    BaseRelayState,
    no_selection_schedule,
    select_exhaustive,
    select_greedy,
    select_random,
)
from .signal_model import NoiseModel, draw_channels, generate_codes, random_bpsk, snr_to_noise_var

__all__ = ["Trial", "EpochRecord", "point_streams", "spreading_codes"]

STREAMS = ("channel", "data", "noise", "selection", "pilot")
CODE_TAG = 0x5EED


def spreading_codes(config: SimConfig) -> np.ndarray:
    """Codes shared by every point of a run (they depend on the seed only)."""
    return generate_codes(config.K, config.N, np.random.default_rng([config.seed, CODE_TAG]))


def point_streams(seed: int, tag) -> dict:
    """Independent generators for one operating point."""
    tag = [int(t) for t in np.atleast_1d(tag)]
    children = np.random.SeedSequence([int(seed)] + tag).spawn(len(STREAMS))
    return {name: np.random.default_rng(ss) for name, ss in zip(STREAMS, children)}


@dataclass
class EpochRecord:
    epoch: int
    kind: str  # "sr", "rd", "broadcast" or "idle"
    pair: tuple | None = None
    pairs_examined: int = 0
    fallbacks: int = 0
    bit_errors: int = 0
    bits: int = 0
    delivered: int = 0


class _AllTransmit:
    # every relay holds the broadcast packet in the non-buffered scheme
    def can_transmit(self, l):
        return True

    def can_receive(self, l):
        return False


@dataclass
class _Packet:
    bits: np.ndarray  # (2, K, M)
    pending: set = field(default_factory=lambda: {0, 1})
    arrived: int = 0


class Trial:
    """State of one simulated operating point.

    Parameters
    ----------
    config : SimConfig
    snr_db : float
        Input SNR of this point.
    J : int, optional
        Initial buffer size (defaults to ``config.J``).
    tag : int or sequence of int
        Mixed with ``config.seed`` to derive the random streams. Runs that
        share seed and tag see the same channel sequence.
    codes : ndarray, optional
        Spreading codes; derived from the seed when omitted.
    """

    def __init__(self, config: SimConfig, snr_db: float, J: int | None = None, tag=0, codes=None):
        self.config = config
        self.snr_db = float(snr_db)
        self.noise_var = snr_to_noise_var(snr_db)
        self.policy = config.policy()
        self.J = int(config.J if J is None else J)
        self.codes = spreading_codes(config) if codes is None else np.asarray(codes)
        self.rng = point_streams(config.seed, tag)
        self.noise = NoiseModel(self.noise_var, self.rng["noise"])
        self.pilot_noise = NoiseModel(self.noise_var, self.rng["pilot"])
        self.pilots = None
        if config.estimation:
            self.pilots = random_bpsk(config.pilots, self.rng["pilot"]).astype(float)
        self.bank = BufferBank(config.L, self.J)
        self.trace = DelayTrace(config.L, warmup=2 * self.J)
        self.epoch = 0
        self.packets: dict[int, _Packet] = {}
        self.next_packet = 0
        self.delivered = 0
        self.delivery_epoch: dict[int, int] = {}
        self._prefix = 0  # packets 0.._prefix-1 have all been delivered
        self.bit_errors = 0
        self.bits = 0
        self.idle_epochs = 0
        self.examined: list[int] = []
        self.rd_errors: list[tuple[int, int]] = []
        self.capacity_history: list[int] = []
        # non-buffered and fixed-pair schemes keep the current packet here
        self._held: dict[int, tuple[int, np.ndarray]] = {}
        self._none_pairs = no_selection_schedule(config.L) if config.selection == "none" else None
        self._none_cursor = 0

    # -- channel state -------------------------------------------------

    def _draw(self):
        cfg = self.config
        channel = draw_channels(cfg.K, cfg.L, self.rng["channel"], law=cfg.channel_law)
        sr_true, rd_true = channel.signatures(self.codes)
        if cfg.estimation:
            known = estimate_realization(channel, self.codes, self.pilots, self.pilot_noise)
            sr_known, rd_known = known.signatures(self.codes)
        else:
            known = channel
            sr_known, rd_known = sr_true, rd_true
        return channel, known, sr_true, rd_true, sr_known, rd_known

    # -- hops ------------------------------------------------------------

    def _new_packet(self):
        cfg = self.config
        bits = random_bpsk((2, cfg.K, cfg.M), self.rng["data"])
        pid = self.next_packet
        self.next_packet += 1
        self.packets[pid] = _Packet(bits)
        return pid, bits

    def _relay_decode(self, relays, bits, sr_true, sr_w):
        """Decisions of each relay in ``relays`` on the packet pair ``bits``."""
        out = {}
        for l in relays:
            if self.config.relay_detector == "perfect":
                out[l] = bits.copy()
                continue
            dec = np.empty_like(bits)
            for t in range(2):
                y = sr_true[l] @ bits[t] + self.noise.draw((self.config.N, self.config.M))
                dec[t] = slicer(np.conj(sr_w[l]).T @ y)
            out[l] = dec
        return out

    def _dest_detect(self, G_own, y_stack, G_all=None):
        """Decisions for the ``2K`` streams of one pair, rows ``2k``/``2k+1``."""
        det = self.config.dest_detector
        if det == "rake":
            return slicer(np.conj(G_own).T @ y_stack)
        if det == "mmse":
            G = G_own if G_all is None else G_all
            R = G @ np.conj(G).T + self.noise_var * np.eye(G.shape[0])
            W = covariance_filters(R, G_own)
            return slicer(np.conj(W).T @ y_stack)
        # joint ML over this pair's streams; other pairs are treated as noise
        return ml_joint_detect(G_own, y_stack)

    def _take_half(self, pid, prefer):
        pending = self.packets[pid].pending
        half = prefer if prefer in pending else next(iter(pending))
        pending.discard(half)
        return half

    def _deliver(self, pid, half, detected):
        """Count errors of one delivered half and retire finished packets."""
        truth = self.packets[pid].bits[half]
        errors = int(np.count_nonzero(detected != truth))
        self.delivery_epoch[2 * pid + half] = self.epoch
        packet = self.packets[pid]
        packet.arrived += 1
        if packet.arrived == 2:
            del self.packets[pid]
        self.delivered += 1
        return errors, truth.size

    def _forward(self, rd_true, rd_known, sends):
        """All pairs in ``sends`` transmit at once.

        ``sends`` is a list of ``((m, n), (pid_m, half_m, b_m), (pid_n, half_n, b_n))``.
        Returns ``(bit_errors, bits)``.
        """
        y1 = 0.0
        y2 = 0.0
        for (m, n), (_, _, b_m), (_, _, b_n) in sends:
            a, b = transmit_dstc_multiuser(rd_true[m], rd_true[n], b_m, b_n)
            y1 = y1 + a
            y2 = y2 + b
        y1 = y1 + self.noise.draw(y1.shape)
        y2 = y2 + self.noise.draw(y2.shape)
        y = stack_observation(y1, y2)
        G_all = None
        if len(sends) > 1:
            G_all = np.hstack([multiuser_stacked_channel(rd_known[m], rd_known[n]) for (m, n), _, _ in sends])
        errors = bits = 0
        for (m, n), (pid_m, h_m, _), (pid_n, h_n, _) in sends:
            G = multiuser_stacked_channel(rd_known[m], rd_known[n])
            dec = self._dest_detect(G, y, G_all)
            e1, n1 = self._deliver(pid_m, h_m, dec[0::2])
            e2, n2 = self._deliver(pid_n, h_n, dec[1::2])
            errors += e1 + e2
            bits += n1 + n2
        return errors, bits

    # -- epoch -----------------------------------------------------------

    def run_epoch(self) -> EpochRecord:
        cfg = self.config
        channel, known, sr_true, rd_true, sr_known, rd_known = self._draw()
        if cfg.buffer_mode == "power":
            self.J = adapt_size_power(self.policy, self.J, known.min_link_power(self.codes))
            self.bank.resize(self.J)
        sr_w = None
        if cfg.relay_detector != "perfect":
            sr_w = hop_filters(sr_known, cfg.relay_detector, self.noise_var)
        arrivals = np.zeros(cfg.L, dtype=int)
        departures = np.zeros(cfg.L, dtype=int)
        sojourns: list[int] = []

        if cfg.selection == "none":
            rec = self._epoch_fixed_pairs(sr_true, rd_true, rd_known, sr_w, arrivals, departures, sojourns)
        elif cfg.scheme == "nonbuffered":
            rec = self._epoch_nonbuffered(sr_true, rd_true, sr_known, rd_known, sr_w, arrivals, departures, sojourns)
        else:
            rec = self._epoch_buffered(sr_true, rd_true, sr_known, rd_known, sr_w, arrivals, departures, sojourns)

        if cfg.scheme == "buffered" and cfg.selection != "none":
            occupancy = self.bank.occupancy()
        else:
            occupancy = np.array([1 if l in self._held else 0 for l in range(cfg.L)])
        self.trace.record(occupancy, self.bank.capacities(), arrivals, departures, sojourns)
        self.capacity_history.append(self.J)
        if rec.kind == "idle":
            self.idle_epochs += 1
        if rec.bits:
            self.rd_errors.append((rec.bit_errors, rec.bits))
            self.bit_errors += rec.bit_errors
            self.bits += rec.bits
        self.epoch += 1
        return rec

    def _table(self, sr_known, rd_known, sr_w, eager):
        cfg = self.config
        if sr_w is None:
            sr_w = hop_filters(sr_known, "rake", self.noise_var)
        rd_w = hop_filters(rd_known, cfg.dest_detector, self.noise_var)
        return build_table(sr_known, rd_known, self.noise_var, eager=eager, epoch=self.epoch, sr_filters=sr_w, rd_filters=rd_w)

    def _select(self, table, view, phases):
        sel = self.config.selection
        if sel == "exhaustive":
            return select_exhaustive(table, view, phases)
        if sel == "greedy":
            return select_greedy(table, view, phases, BaseRelayState())
        return select_random(table, view, self.rng["selection"], phases)

    def _epoch_buffered(self, sr_true, rd_true, sr_known, rd_known, sr_w, arrivals, departures, sojourns):
        cfg = self.config
        table = self._table(sr_known, rd_known, sr_w, eager=cfg.selection == "exhaustive")
        decision = self._select(table, self.bank, (Phase.SOURCE_RELAY, Phase.RELAY_DEST))
        rec = EpochRecord(self.epoch, "idle", pairs_examined=decision.candidates_examined, fallbacks=decision.fallbacks_taken)
        if cfg.selection != "random":
            self.examined.append(decision.candidates_examined)
        if decision.idle:
            return rec
        m, n = decision.pair
        rec.pair = decision.pair
        if decision.phase is Phase.SOURCE_RELAY:
            rec.kind = "sr"
            pid, bits = self._new_packet()
            decoded = self._relay_decode((m, n), bits, sr_true, sr_w)
            for l in (m, n):
                self.bank[l].push(BufferEntry(pid, decoded[l]), self.epoch)
                arrivals[l] += 1
            return rec
        rec.kind = "rd"
        sends = []
        parts = []
        for l, prefer in ((m, 0), (n, 1)):
            entry, stored = self.bank[l].pop(self.epoch)
            departures[l] += 1
            sojourns.append(stored)
            half = self._take_half(entry.packet_id, prefer)
            parts.append((entry.packet_id, half, entry.decoded[half]))
        sends.append(((m, n), parts[0], parts[1]))
        rec.bit_errors, rec.bits = self._forward(rd_true, rd_known, sends)
        rec.delivered = 2
        return rec

    def _epoch_nonbuffered(self, sr_true, rd_true, sr_known, rd_known, sr_w, arrivals, departures, sojourns):
        cfg = self.config
        if not self._held:
            pid, bits = self._new_packet()
            decoded = self._relay_decode(range(cfg.L), bits, sr_true, sr_w)
            self._held = {l: (pid, decoded[l]) for l in range(cfg.L)}
            arrivals[:] = 1
            return EpochRecord(self.epoch, "broadcast")
        table = self._table(sr_known, rd_known, sr_w, eager=cfg.selection == "exhaustive")
        decision = self._select(table, _AllTransmit(), (Phase.RELAY_DEST,))
        if cfg.selection != "random":
            self.examined.append(decision.candidates_examined)
        m, n = decision.pair
        pid = self._held[m][0]
        h_m = self._take_half(pid, 0)
        h_n = self._take_half(pid, 1)
        sends = [((m, n), (pid, h_m, self._held[m][1][h_m]), (pid, h_n, self._held[n][1][h_n]))]
        departures[:] = 1
        sojourns.extend([1, 1])
        self._held = {}
        rec = EpochRecord(self.epoch, "rd", pair=(m, n), pairs_examined=decision.candidates_examined, fallbacks=decision.fallbacks_taken)
        rec.bit_errors, rec.bits = self._forward(rd_true, rd_known, sends)
        rec.delivered = 2
        return rec

    def _epoch_fixed_pairs(self, sr_true, rd_true, rd_known, sr_w, arrivals, departures, sojourns):
        pairs = self._none_pairs
        if self._none_cursor < len(pairs):
            m, n = pairs[self._none_cursor]
            self._none_cursor += 1
            pid, bits = self._new_packet()
            decoded = self._relay_decode((m, n), bits, sr_true, sr_w)
            for l in (m, n):
                self._held[l] = (pid, decoded[l])
                arrivals[l] += 1
            return EpochRecord(self.epoch, "sr", pair=(m, n))
        sends = []
        for m, n in pairs:
            pid, dec_m = self._held[m]
            _, dec_n = self._held[n]
            h_m = self._take_half(pid, 0)
            h_n = self._take_half(pid, 1)
            sends.append(((m, n), (pid, h_m, dec_m[h_m]), (pid, h_n, dec_n[h_n])))
            departures[m] += 1
            departures[n] += 1
            sojourns.extend([len(pairs), len(pairs)])
        self._held = {}
        self._none_cursor = 0
        rec = EpochRecord(self.epoch, "rd")
        rec.bit_errors, rec.bits = self._forward(rd_true, rd_known, sends)
        rec.delivered = 2 * len(pairs)
        return rec

    # -- driving -----------------------------------------------------------

    def epoch_cap(self, packets: int) -> int:
        if self.config.max_epochs is not None:
            return self.config.max_epochs
        return 50 * packets + 200

    def run(self, packets: int) -> "Trial":
        """Simulate until ``packets`` packets have reached the destination."""
        cap = self.epoch_cap(packets)
        while self.delivered < packets and self.epoch < cap:
            self.run_epoch()
        return self

    def run_until_first(self, count: int) -> "Trial":
        """Simulate until source packets ``0 .. count-1`` have all been delivered."""
        cap = self.epoch_cap(count)
        while self.epoch < cap:
            while self._prefix < count and self._prefix in self.delivery_epoch:
                self._prefix += 1
            if self._prefix >= count:
                break
            self.run_epoch()
        return self
