"""Spreading codes, fading channels and the source-to-relay transmission.

Conventions used across the package:

* A spreading code matrix has shape ``(K, N)``: one row of ``N`` chips per
  user, every chip equal to ``+-1/sqrt(N)``.
* Effective signatures of one hop are stored per relay as an array of shape
  ``(L, N, K)``, so ``sig[l]`` is the ``N x K`` matrix whose columns are the
  users' signatures on the links touching relay ``l``.
* BPSK symbols are ``int8`` arrays with entries ``+1`` / ``-1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ModelError

__all__ = [
    "NoiseModel",
    "ChannelRealization",
    "as_generator",
    "snr_to_noise_var",
    "generate_codes",
    "draw_channels",
    "effective_signature",
    "random_bpsk",
    "transmit_source_phase",
]

CHANNEL_LAWS = ("uniform", "rayleigh")


def as_generator(seed) -> np.random.Generator:
    """Return ``seed`` if it is already a Generator, otherwise build one."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def snr_to_noise_var(snr_db: float) -> float:
    """Noise variance for unit mean received signal power per user-link."""
    return float(10.0 ** (-snr_db / 10.0))


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean circularly symmetric complex Gaussian noise.

    Parameters
    ----------
    variance : float
        Total complex variance per sample (sigma squared).
    rng : numpy.random.Generator
        Stream the samples are drawn from.
    """

    variance: float
    rng: np.random.Generator

    def __post_init__(self):
        if not self.variance > 0:
            raise ConfigurationError(f"noise variance must be positive, got {self.variance}")

    def draw(self, shape) -> np.ndarray:
        scale = np.sqrt(self.variance / 2.0)
        re = self.rng.standard_normal(shape)
        im = self.rng.standard_normal(shape)
        return scale * (re + 1j * im)


@dataclass(frozen=True)
class ChannelRealization:
    """Fading coefficients of one selection epoch.

    ``sr[k, l]`` is the gain from user ``k`` to relay ``l`` and ``rd[l, k]``
    the gain from relay ``l`` to the destination for user ``k``.
    """

    sr: np.ndarray
    rd: np.ndarray

    @property
    def users(self) -> int:
        return self.sr.shape[0]

    @property
    def relays(self) -> int:
        return self.sr.shape[1]

    def coefficient_count(self) -> int:
        return self.sr.size + self.rd.size

    def signatures(self, codes: np.ndarray, amp_sr=1.0, amp_rd=1.0):
        """Effective signatures of both hops, each shaped ``(L, N, K)``."""
        codes = np.asarray(codes, dtype=float)
        if codes.shape[0] != self.users:
            raise ModelError(f"{codes.shape[0]} codes for {self.users} users")
        # sig[l, :, k] = a * s_k * h
        sr_sig = amp_sr * codes.T[None, :, :] * self.sr.T[:, None, :]
        rd_sig = amp_rd * codes.T[None, :, :] * self.rd[:, None, :]
        return sr_sig, rd_sig

    def min_link_power(self, codes: np.ndarray, amp_sr=1.0, amp_rd=1.0) -> float:
        """Smallest squared norm over every effective signature of both hops."""
        sr_sig, rd_sig = self.signatures(codes, amp_sr, amp_rd)
        p_sr = np.sum(np.abs(sr_sig) ** 2, axis=1)
        p_rd = np.sum(np.abs(rd_sig) ** 2, axis=1)
        return float(min(p_sr.min(), p_rd.min()))


def generate_codes(K: int, N: int, seed=None) -> np.ndarray:
    """Random binary spreading codes normalised to unit energy.

    Returns an array of shape ``(K, N)`` whose entries are ``+-1/sqrt(N)``.
    The same integer seed always yields the same codes.

    >>> codes = generate_codes(2, 4, seed=0)
    >>> codes.shape, float(abs(codes).max())
    ((2, 4), 0.5)
    """
    if K < 1 or N < 1:
        raise ConfigurationError(f"need K >= 1 and N >= 1, got K={K}, N={N}")
    rng = as_generator(seed)
    chips = rng.integers(0, 2, size=(K, N)) * 2 - 1
    return chips / np.sqrt(N)


def draw_channels(K: int, L: int, seed=None, law: str = "uniform") -> ChannelRealization:
    """Draw one realization of every source-relay and relay-destination gain.

    With ``law="uniform"`` each coefficient is ``r * exp(j*theta)`` with ``r``
    uniform on ``[0, sqrt(3)]`` and ``theta`` uniform on ``[0, 2*pi)``, so the
    mean power ``E|h|^2`` is one. ``law="rayleigh"`` draws unit-variance
    circular Gaussian gains instead.
    """
    if K < 1 or L < 1:
        raise ConfigurationError(f"need K >= 1 and L >= 1, got K={K}, L={L}")
    rng = as_generator(seed)
    if law == "uniform":
        r = np.sqrt(3.0) * rng.random(2 * K * L)
        theta = 2.0 * np.pi * rng.random(2 * K * L)
        h = r * np.exp(1j * theta)
    elif law == "rayleigh":
        h = (rng.standard_normal(2 * K * L) + 1j * rng.standard_normal(2 * K * L)) / np.sqrt(2.0)
    else:
        raise ConfigurationError(f"unknown channel law {law!r}; expected one of {CHANNEL_LAWS}")
    return ChannelRealization(sr=h[: K * L].reshape(K, L), rd=h[K * L :].reshape(L, K))


def effective_signature(a: float, s: np.ndarray, h: complex) -> np.ndarray:
    """``a * h * s`` as a complex vector."""
    return a * h * np.asarray(s, dtype=complex)


def random_bpsk(shape, rng) -> np.ndarray:
    return (rng.integers(0, 2, size=shape, dtype=np.int8) * 2 - 1).astype(np.int8)


def transmit_source_phase(signatures: np.ndarray, b: np.ndarray, noise: NoiseModel | None = None) -> np.ndarray:
    """Chip vectors received at one relay while every user transmits.

    Parameters
    ----------
    signatures : ndarray, shape (N, K)
        Effective signatures of the links from each user to this relay.
    b : ndarray, shape (K,) or (K, M)
        One BPSK symbol per user, or ``M`` consecutive symbols per user.
    noise : NoiseModel, optional
        ``None`` gives the noiseless superposition.

    Returns
    -------
    ndarray, shape (N,) or (N, M)
    """
    signatures = np.asarray(signatures)
    b = np.asarray(b)
    if signatures.ndim != 2 or b.shape[0] != signatures.shape[1]:
        raise ModelError(f"signatures {signatures.shape} do not match symbols {b.shape}")
    y = signatures @ b
    if noise is not None:
        y = y + noise.draw(y.shape)
    return y
