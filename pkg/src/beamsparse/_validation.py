"""Input validation helpers shared by the estimators and functional API."""

import math
import numbers

import numpy as np

from .exceptions import DimensionError, DomainError


def check_complex_matrix(A, name="array", ndim=2):
    """Return ``A`` as a finite complex ndarray with ``ndim`` dimensions."""
    A = np.asarray(A)
    if A.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-D, got shape {A.shape}")
    if A.size == 0:
        raise DimensionError(f"{name} is empty")
    A = A.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def check_channel(H, domain="beamspace"):
    """Validate a B x U channel and return it as a complex ndarray.

    Accepts a raw array or a :class:`~beamsparse.channel.ChannelMatrix`; in the
    latter case the domain tag must match ``domain``.
    """
    tag = getattr(H, "domain", None)
    if tag is not None:
        if domain is not None and tag != domain:
            raise DomainError(f"expected a {domain} channel, got {tag}")
        H = H.data
    H = check_complex_matrix(H, "channel")
    B, U = H.shape
    if U > B:
        raise DimensionError(f"need B >= U, got B={B}, U={U}")
    return H


def check_rho(rho, allow_zero=False):
    if not isinstance(rho, numbers.Real) or not math.isfinite(rho):
        raise ValueError(f"rho must be a finite real, got {rho!r}")
    if rho < 0 or (rho == 0 and not allow_zero):
        raise ValueError(f"rho must be {'>= 0' if allow_zero else '> 0'}, got {rho}")
    return float(rho)


def check_n_beams(K, B):
    if not isinstance(K, numbers.Integral) or isinstance(K, bool):
        raise ValueError(f"K must be an integer, got {K!r}")
    if not 1 <= K <= B:
        raise ValueError(f"K must lie in [1, {B}], got {K}")
    return int(K)


def density_to_beams(delta, B):
    """Number of retained beams for density ``delta``: nearest integer, at least 1."""
    if not 0 < delta <= 1:
        raise ValueError(f"density must lie in (0, 1], got {delta}")
    return max(1, min(B, math.floor(delta * B + 0.5)))


def is_power_of_two(n):
    return isinstance(n, numbers.Integral) and n >= 1 and (n & (n - 1)) == 0


def check_power_of_two(n, name="B"):
    if not is_power_of_two(n):
        raise ValueError(f"{name} must be a power of two, got {n}")
    return int(n)
