"""Alamouti coding across a relay pair and the relay-to-destination model."""

from __future__ import annotations

import numpy as np

from .errors import ModelError
from .signal_model import NoiseModel

__all__ = [
    "alamouti_encode",
    "transmit_dstc_phase",
    "build_stacked_channel",
    "stack_observation",
    "multiuser_stacked_channel",
    "transmit_dstc_multiuser",
]


def alamouti_encode(b_m, b_n) -> np.ndarray:
    """Build the 2x2 Alamouti block ``[[b_m, -b_n*], [b_n, b_m*]]``.

    Row ``r`` holds what relay ``r`` of the pair sends in the two slots.
    Array inputs are broadcast: the result has shape ``(2, 2) + shape``.

    >>> alamouti_encode(1, -1).real.astype(int).tolist()
    [[1, 1], [-1, 1]]
    """
    b_m = np.asarray(b_m, dtype=complex)
    b_n = np.asarray(b_n, dtype=complex)
    b_m, b_n = np.broadcast_arrays(b_m, b_n)
    return np.array([[b_m, -np.conj(b_n)], [b_n, np.conj(b_m)]])


def transmit_dstc_phase(h_m, h_n, block: np.ndarray, noise: NoiseModel | None = None):
    """Received chip vectors for the two slots of one Alamouti block.

    ``y1 = h_m b_m + h_n b_n + n1`` and ``y2 = h_n b_m^* - h_m b_n^* + n2``.
    With ``M`` symbols per slot, ``block`` has shape ``(2, 2, M)`` and each
    returned vector has shape ``(N, M)``.
    """
    h_m = np.asarray(h_m)
    h_n = np.asarray(h_n)
    block = np.asarray(block)
    if h_m.shape != h_n.shape or h_m.ndim != 1:
        raise ModelError(f"signature shapes {h_m.shape} and {h_n.shape} differ")
    if block.shape[:2] != (2, 2):
        raise ModelError(f"Alamouti block must start with shape (2, 2), got {block.shape}")
    tail = block.shape[2:]
    hm = h_m.reshape(h_m.shape + (1,) * len(tail))
    hn = h_n.reshape(h_n.shape + (1,) * len(tail))
    y1 = hm * block[0, 0] + hn * block[1, 0]
    y2 = hm * block[0, 1] + hn * block[1, 1]
    if noise is not None:
        y1 = y1 + noise.draw(y1.shape)
        y2 = y2 + noise.draw(y2.shape)
    return y1, y2


def build_stacked_channel(h_m, h_n) -> np.ndarray:
    """The ``2N x 2`` matrix ``[[h_m, h_n], [h_n^*, -h_m^*]]``."""
    h_m = np.asarray(h_m, dtype=complex)
    h_n = np.asarray(h_n, dtype=complex)
    if h_m.shape != h_n.shape or h_m.ndim != 1:
        raise ModelError(f"signature shapes {h_m.shape} and {h_n.shape} differ")
    top = np.stack([h_m, h_n], axis=1)
    bottom = np.stack([np.conj(h_n), -np.conj(h_m)], axis=1)
    return np.vstack([top, bottom])


def stack_observation(y1, y2) -> np.ndarray:
    """``[y1; y2^*]``, the observation matching :func:`build_stacked_channel`."""
    return np.concatenate([np.asarray(y1), np.conj(y2)], axis=0)


def multiuser_stacked_channel(sig_m: np.ndarray, sig_n: np.ndarray) -> np.ndarray:
    """Stacked channels of all users side by side.

    ``sig_m`` and ``sig_n`` are ``(N, K)`` destination signatures of relays
    ``m`` and ``n``. Column ``2k`` (``2k+1``) of the ``2N x 2K`` result is the
    stacked channel seen by user ``k``'s first (second) Alamouti symbol.
    """
    sig_m = np.asarray(sig_m, dtype=complex)
    sig_n = np.asarray(sig_n, dtype=complex)
    if sig_m.shape != sig_n.shape:
        raise ModelError(f"signature shapes {sig_m.shape} and {sig_n.shape} differ")
    N, K = sig_m.shape
    G = np.empty((2 * N, 2 * K), dtype=complex)
    G[:N, 0::2] = sig_m
    G[N:, 0::2] = np.conj(sig_n)
    G[:N, 1::2] = sig_n
    G[N:, 1::2] = -np.conj(sig_m)
    return G


def transmit_dstc_multiuser(sig_m, sig_n, b_m, b_n, noise: NoiseModel | None = None):
    """Every user's Alamouti block sent at once through relays ``m`` and ``n``.

    ``b_m`` and ``b_n`` are real BPSK arrays of shape ``(K, M)``. Returns the
    two received slots, each ``(N, M)``.
    """
    sig_m = np.asarray(sig_m)
    sig_n = np.asarray(sig_n)
    b_m = np.asarray(b_m, dtype=float)
    b_n = np.asarray(b_n, dtype=float)
    if b_m.shape != b_n.shape or b_m.shape[0] != sig_m.shape[1]:
        raise ModelError("symbol blocks do not match the number of users")
    y1 = sig_m @ b_m + sig_n @ b_n
    # BPSK is real, so conjugating the symbols is a no-op
    y2 = sig_n @ b_m - sig_m @ b_n
    if noise is not None:
        y1 = y1 + noise.draw(y1.shape)
        y2 = y2 + noise.draw(y2.shape)
    return y1, y2
