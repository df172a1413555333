"""Receive filters and detectors.

Filters for one hop are computed per relay, so ``rake_filters`` and
``mmse_filters`` take an ``(L, N, K)`` (or ``(N, K)``) signature array and
return weights of the same shape, with ``weights[..., k]`` the filter for
user ``k``.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import IllConditionedModelError, ModelError

__all__ = [
    "rake_filter",
    "rake_filters",
    "mmse_filter",
    "mmse_filters",
    "covariance_filters",
    "slicer",
    "linear_detect",
    "ml_alamouti_detect",
    "ml_joint_detect",
    "MMSE_RESIDUAL_TOL",
]

MMSE_RESIDUAL_TOL = 1e-10


def rake_filter(signature: np.ndarray) -> np.ndarray:
    """Matched filter: the effective signature itself."""
    return np.array(signature, dtype=complex, copy=True)


def rake_filters(signatures: np.ndarray) -> np.ndarray:
    return np.array(signatures, dtype=complex, copy=True)


def _solve_verified(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    try:
        X = np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedModelError(f"MMSE system is singular: {exc}") from None
    residual = A @ X - B
    scale = np.maximum(1.0, np.linalg.norm(B, axis=-2, keepdims=True))
    bad = np.linalg.norm(residual, axis=-2, keepdims=True) > MMSE_RESIDUAL_TOL * scale
    if np.any(bad):
        # one round of iterative refinement
        X = X - np.linalg.solve(A, residual)
        residual = A @ X - B
        if np.any(np.linalg.norm(residual, axis=-2, keepdims=True) > MMSE_RESIDUAL_TOL * scale):
            raise IllConditionedModelError("MMSE system could not be solved to the residual tolerance")
    return X


def mmse_filters(signatures: np.ndarray, noise_var: float) -> np.ndarray:
    """Linear MMSE filters ``(sum_k h_k h_k^H + sigma^2 I)^-1 h_k`` for every user.

    Parameters
    ----------
    signatures : ndarray, shape (..., N, K)
        Signatures of all users seen by one receiver (leading axes are
        independent receivers, e.g. relays).
    noise_var : float
        Noise variance; must be positive so the system is invertible.

    Returns
    -------
    ndarray, shape (..., N, K)
    """
    if not noise_var > 0:
        raise IllConditionedModelError(f"MMSE filter needs noise variance > 0, got {noise_var}")
    S = np.asarray(signatures, dtype=complex)
    if S.ndim < 2:
        raise ModelError("signatures must be at least two-dimensional (N, K)")
    N = S.shape[-2]
    A = S @ np.conj(np.swapaxes(S, -1, -2)) + noise_var * np.eye(N)
    return _solve_verified(A, S)


def covariance_filters(R: np.ndarray, G: np.ndarray) -> np.ndarray:
    """``R^-1 G`` for a Hermitian positive definite covariance ``R``."""
    return _solve_verified(np.asarray(R, dtype=complex), np.asarray(G, dtype=complex))


def mmse_filter(signatures: np.ndarray, k: int, noise_var: float) -> np.ndarray:
    """MMSE filter for user ``k`` given all signatures ``(N, K)`` on the link."""
    return mmse_filters(signatures, noise_var)[:, k]


def slicer(z) -> np.ndarray | int:
    """BPSK decision: +1 where ``Re(z) >= 0``, otherwise -1."""
    out = np.where(np.real(z) >= 0, 1, -1).astype(np.int8)
    if out.ndim == 0:
        return int(out)
    return out


def linear_detect(w: np.ndarray, y: np.ndarray):
    """Slice ``w^H y``.

    ``w`` may be a single filter ``(N,)`` or a bank ``(N, K)``; ``y`` is one
    observation ``(N,)`` or a block ``(N, M)``.
    """
    w = np.asarray(w)
    y = np.asarray(y)
    if w.shape[0] != y.shape[0]:
        raise ModelError(f"filter length {w.shape[0]} != observation length {y.shape[0]}")
    return slicer(np.conj(w).T @ y)


def ml_alamouti_detect(h_m: np.ndarray, h_n: np.ndarray, y1: np.ndarray, y2: np.ndarray):
    """Decoupled Alamouti combining followed by slicing.

    Computes ``h_m^H y1 + h_n^T y2^*`` and ``h_n^H y1 - h_m^T y2^*``. For BPSK
    (and any constant-modulus alphabet) this gives the same decisions as a
    brute-force search over the stacked model ``||y - H b||^2``, because the
    stacked channel has orthogonal columns of equal norm.

    Returns
    -------
    (b_m, b_n) : tuple of int or ndarray
    """
    h_m = np.asarray(h_m)
    h_n = np.asarray(h_n)
    y1 = np.asarray(y1)
    y2 = np.asarray(y2)
    if not (h_m.shape[0] == h_n.shape[0] == y1.shape[0] == y2.shape[0]):
        raise ModelError("signatures and observations must share the chip dimension")
    y2c = np.conj(y2)
    z_m = np.conj(h_m) @ y1 + h_n @ y2c
    z_n = np.conj(h_n) @ y1 - h_m @ y2c
    return slicer(z_m), slicer(z_n)


def _bpsk_hypotheses(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def ml_joint_detect(G: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Exhaustive ML search for real BPSK symbols in ``y = G b + n``.

    Parameters
    ----------
    G : ndarray, shape (D, S)
        Columns are the signatures of the ``S`` unknown symbols.
    y : ndarray, shape (D,) or (D, M)

    Returns
    -------
    ndarray of int8, shape (S,) or (S, M)
        The BPSK vector minimising ``||y - G b||^2`` for each column of ``y``.
        Ties resolve to the first hypothesis in ``itertools.product`` order.
    """
    G = np.asarray(G)
    y = np.asarray(y)
    if G.shape[0] != y.shape[0]:
        raise ModelError(f"model has {G.shape[0]} rows, observation {y.shape[0]}")
    single = y.ndim == 1
    if single:
        y = y[:, None]
    S = G.shape[1]
    if S > 16:
        raise ModelError(f"joint ML over {S} symbols is too large")
    B = _bpsk_hypotheses(S)
    R = np.real(np.conj(G).T @ G)
    z = np.real(np.conj(G).T @ y)
    # ||y - Gb||^2 - ||y||^2 = b^T Re(G^H G) b - 2 b^T Re(G^H y)
    quad = np.einsum("hs,st,ht->h", B, R, B)
    metric = quad[:, None] - 2.0 * (B @ z)
    best = np.argmin(metric, axis=0)
    out = B[best].T.astype(np.int8)
    return out[:, 0] if single else out
