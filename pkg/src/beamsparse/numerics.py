"""Complex linear-algebra kernel: unitary DFT, HPD solves, rank-one inverse updates."""

import numpy as np
import scipy.linalg

from ._validation import check_power_of_two
from .exceptions import DegenerateUpdateError, DimensionError, NotPositiveDefiniteError

__all__ = [
    "dft_matrix",
    "beamspace_transform",
    "inverse_beamspace_transform",
    "solve_hpd",
    "hpd_inverse",
    "sherman_morrison_update",
]

HERMITIAN_TOL = 1e-10
SM_DENOMINATOR_TOL = 1e-14


def dft_matrix(B):
    """Unitary B x B DFT matrix, ``F[k, b] = exp(-2j*pi*k*b/B) / sqrt(B)``."""
    idx = np.arange(B)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / B) / np.sqrt(B)


def _check_length(x, B, axis):
    x = np.asarray(x)
    if B is not None and x.shape[axis] != B:
        raise DimensionError(f"expected length {B} along axis {axis}, got {x.shape[axis]}")
    check_power_of_two(x.shape[axis], "transform length")
    return x


def beamspace_transform(x, B=None, axis=0):
    """Apply the unitary DFT along ``axis`` (columns of a B x U matrix by default).

    Parameters
    ----------
    x : array_like
        Antenna-domain vector or matrix.
    B : int, optional
        Expected transform length; a mismatch raises :class:`DimensionError`.
    axis : int
        Axis holding the antenna index.
    """
    x = _check_length(x, B, axis)
    return np.fft.fft(x, axis=axis, norm="ortho")


def inverse_beamspace_transform(y, B=None, axis=0):
    y = _check_length(y, B, axis)
    return np.fft.ifft(y, axis=axis, norm="ortho")


def _check_hermitian(G):
    G = np.asarray(G, dtype=np.complex128)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {G.shape}")
    scale = max(1.0, float(np.max(np.abs(G))))
    if np.max(np.abs(G - G.conj().T)) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    return G


def solve_hpd(G, rhs):
    """Solve ``G X = rhs`` for Hermitian positive-definite ``G`` via Cholesky.

    No pivoting is done; a non-positive pivot raises
    :class:`NotPositiveDefiniteError`.
    """
    G = _check_hermitian(G)
    rhs = np.asarray(rhs, dtype=np.complex128)
    if rhs.shape[0] != G.shape[0]:
        raise DimensionError(f"rhs has {rhs.shape[0]} rows, G is {G.shape[0]}x{G.shape[0]}")
    try:
        factor = scipy.linalg.cho_factor(G, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from None
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def hpd_inverse(G):
    X = solve_hpd(G, np.eye(G.shape[0], dtype=np.complex128))
    return 0.5 * (X + X.conj().T)


def sherman_morrison_update(G_inv, v):
    """Return ``(G + v v^H)^{-1}`` given ``G_inv = G^{-1}``.

    Leading axes broadcast, so a stack of inverses of shape ``(..., U, U)``
    can be updated with a stack of vectors of shape ``(..., U)`` in one call.
    """
    G_inv = np.asarray(G_inv, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if G_inv.shape[-1] != v.shape[-1] or G_inv.shape[-2] != G_inv.shape[-1]:
        raise DimensionError(f"incompatible shapes {G_inv.shape} and {v.shape}")
    left = np.einsum("...ij,...j->...i", G_inv, v)
    right = np.einsum("...j,...ji->...i", v.conj(), G_inv)
    denom = 1.0 + np.einsum("...i,...i->...", v.conj(), left)
    if np.any(np.abs(denom) < SM_DENOMINATOR_TOL):
        raise DegenerateUpdateError("Sherman-Morrison denominator vanishes")
    return G_inv - left[..., :, None] * right[..., None, :] / denom[..., None, None]
