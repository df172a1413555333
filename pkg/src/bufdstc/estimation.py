"""Least-squares channel estimation from known pilot symbols.

Each user sends ``P`` unit-modulus pilots spread by its own code, one link
at a time, so the observation of link ``(k, l)`` is ``y_t = a h s_k p_t + n_t``
and the LS estimate is ``sum_t s_k^H y_t p_t^* / (a ||s_k||^2 P)``. Its error
variance is ``sigma^2 / (a^2 ||s_k||^2 P)``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, ModelError
from .signal_model import ChannelRealization, NoiseModel

__all__ = ["estimate_channels", "pilot_observations", "estimate_realization"]


def pilot_observations(h, code, pilots, noise: NoiseModel | None = None, amplitude=1.0):
    """Received pilot blocks for an array of gains ``h`` on links using ``code``.

    Returns an array of shape ``h.shape + (N, P)``.
    """
    h = np.asarray(h, dtype=complex)
    code = np.asarray(code)
    pilots = np.asarray(pilots)
    y = amplitude * h[..., None, None] * code[:, None] * pilots[None, :]
    if noise is not None:
        y = y + noise.draw(y.shape)
    return y


def estimate_channels(pilots, received, code, amplitude=1.0) -> np.ndarray:
    """LS gain estimates from pilot blocks.

    Parameters
    ----------
    pilots : ndarray, shape (P,)
        Known unit-modulus pilot symbols.
    received : ndarray, shape (..., N, P)
        Observed chip vectors, one column per pilot.
    code : ndarray, shape (N,)
        Spreading code used on these links.

    Returns
    -------
    ndarray of shape ``received.shape[:-2]``
    """
    pilots = np.asarray(pilots)
    received = np.asarray(received)
    code = np.asarray(code)
    if pilots.ndim != 1 or pilots.size < 1:
        raise ConfigurationError("channel estimation needs at least one pilot")
    if received.shape[-2:] != (code.size, pilots.size):
        raise ModelError(f"received pilots {received.shape} do not match code {code.shape} and pilots {pilots.shape}")
    energy = float(np.vdot(code, code).real)
    despread = np.einsum("n,...np->...p", np.conj(code), received)
    return despread @ np.conj(pilots) / (amplitude * energy * pilots.size)


def estimate_realization(channel: ChannelRealization, codes, pilots, noise: NoiseModel) -> ChannelRealization:
    """Estimated copy of every gain in ``channel``."""
    codes = np.asarray(codes)
    sr = np.empty_like(channel.sr)
    rd = np.empty_like(channel.rd)
    for k in range(channel.users):
        sr[k] = estimate_channels(pilots, pilot_observations(channel.sr[k], codes[k], pilots, noise), codes[k])
        rd[:, k] = estimate_channels(pilots, pilot_observations(channel.rd[:, k], codes[k], pilots, noise), codes[k])
    return ChannelRealization(sr=sr, rd=rd)
