"""Relay FIFO buffers and the rules that resize them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import BufferEmpty, BufferFull, ConfigurationError

__all__ = [
    "BufferEntry",
    "RelayBuffer",
    "BufferBank",
    "DynamicBufferPolicy",
    "adapt_size_snr",
    "adapt_size_power",
    "BUFFER_MODES",
]

BUFFER_MODES = ("fixed", "snr", "power")


@dataclass
class BufferEntry:
    """One stored packet pair (both slots, every user) as decoded by a relay."""

    packet_id: int
    decoded: Any = None
    enqueue_epoch: int = 0


class RelayBuffer:
    """Bounded FIFO of decoded packet pairs held by one relay.

    Shrinking the capacity below the current occupancy keeps every stored
    entry; pushes are refused until pops bring the occupancy back under the
    new capacity.
    """

    def __init__(self, capacity: int, relay: int = 0):
        if capacity < 1:
            raise ConfigurationError(f"buffer capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        self.relay = relay
        self._entries: deque[BufferEntry] = deque()

    def __len__(self):
        return len(self._entries)

    @property
    def occupancy(self) -> int:
        return len(self._entries)

    def can_receive(self) -> bool:
        return len(self._entries) < self.capacity

    def can_transmit(self) -> bool:
        return len(self._entries) > 0

    def is_full(self) -> bool:
        return len(self._entries) >= self.capacity

    def push(self, entry: BufferEntry, epoch: int | None = None) -> None:
        if not self.can_receive():
            raise BufferFull(f"relay {self.relay}: buffer holds {len(self)} of {self.capacity}")
        if epoch is not None:
            entry.enqueue_epoch = epoch
        self._entries.append(entry)

    def pop(self, epoch: int | None = None):
        """Remove the oldest entry.

        Returns ``(entry, stored_epochs)``; ``stored_epochs`` is ``None`` when
        no epoch is given.
        """
        if not self._entries:
            raise BufferEmpty(f"relay {self.relay}: buffer is empty")
        entry = self._entries.popleft()
        stored = None if epoch is None else epoch - entry.enqueue_epoch
        return entry, stored

    def peek(self) -> BufferEntry:
        if not self._entries:
            raise BufferEmpty(f"relay {self.relay}: buffer is empty")
        return self._entries[0]

    def resize(self, capacity: int) -> None:
        if capacity < 1:
            raise ConfigurationError(f"buffer capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)

    def __iter__(self):
        return iter(self._entries)


class BufferBank:
    """The buffers of all relays plus the source backlog flag.

    Selection code only asks :meth:`can_receive` and :meth:`can_transmit`.
    """

    def __init__(self, L: int, capacity: int):
        self.buffers = [RelayBuffer(capacity, relay=l) for l in range(L)]
        self.source_has_data = True

    def __getitem__(self, l) -> RelayBuffer:
        return self.buffers[l]

    def __len__(self):
        return len(self.buffers)

    def can_receive(self, l: int) -> bool:
        return self.source_has_data and self.buffers[l].can_receive()

    def can_transmit(self, l: int) -> bool:
        return self.buffers[l].can_transmit()

    def occupancy(self) -> np.ndarray:
        return np.array([len(b) for b in self.buffers])

    def capacities(self) -> np.ndarray:
        return np.array([b.capacity for b in self.buffers])

    def resize(self, capacity: int) -> None:
        for b in self.buffers:
            b.resize(capacity)

    def fill(self, occupancy) -> "BufferBank":
        """Preload placeholder entries (used to set up selection scenarios)."""
        for b, n in zip(self.buffers, np.broadcast_to(occupancy, len(self.buffers))):
            for _ in range(int(n)):
                b.push(BufferEntry(packet_id=-1))
        return self


@dataclass(frozen=True)
class DynamicBufferPolicy:
    """How the buffer size ``J`` evolves.

    ``mode`` is ``"fixed"``, ``"snr"`` (shrink by ``d2`` for every ``d1`` dB of
    input SNR increase) or ``"power"`` (grow by ``d3`` when the weakest link
    power is at most ``gamma``, shrink by ``d3`` otherwise).
    """

    mode: str = "fixed"
    J: int = 6
    J_min: int = 1
    J_max: int = 12
    gamma: float = 0.5
    d1: float = 2.0
    d2: int = 2
    d3: int = 2

    def __post_init__(self):
        if self.mode not in BUFFER_MODES:
            raise ConfigurationError(f"unknown buffer mode {self.mode!r}; expected one of {BUFFER_MODES}")
        if self.J_min < 1 or self.J_max < self.J_min:
            raise ConfigurationError(f"need 1 <= J_min <= J_max, got {self.J_min}, {self.J_max}")
        if self.d1 <= 0 or self.d2 < 0 or self.d3 < 0:
            raise ConfigurationError("step sizes must be non-negative (d1 > 0)")
        if self.J < 1:
            raise ConfigurationError(f"buffer size must be >= 1, got {self.J}")

    def clamp(self, J: int) -> int:
        return int(min(max(J, self.J_min), self.J_max))


def adapt_size_snr(policy: DynamicBufferPolicy, J_pre: int, snr_pre: float, snr_cur: float) -> int:
    """Buffer size after the input SNR moves from ``snr_pre`` to ``snr_cur``.

    Every ``d1`` dB step up removes ``d2`` slots and every step down adds
    ``d2``; SNR moves are rounded to whole steps.
    """
    steps = int(round((snr_cur - snr_pre) / policy.d1))
    return policy.clamp(J_pre - steps * policy.d2)


def adapt_size_power(policy: DynamicBufferPolicy, J_pre: int, min_link_power: float) -> int:
    """Grow the buffer when the weakest link is at or below ``gamma``, else shrink."""
    if min_link_power <= policy.gamma:
        return policy.clamp(J_pre + policy.d3)
    return policy.clamp(J_pre - policy.d3)
