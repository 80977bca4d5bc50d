"""Real-valued multiplication counts for antenna-domain and beamspace equalization.

All counts are exact Python integers. A complex multiplication costs four
real multiplications.
"""

from dataclasses import dataclass
from numbers import Integral

from ._validation import check_power_of_two

__all__ = [
    "REAL_MULTS_PER_COMPLEX",
    "COMPLEXITY_ALGORITHMS",
    "ComplexityReport",
    "equalization_mults",
    "fft_mults",
    "mult_count",
    "cholesky_solve_count",
    "asymptotic_threshold",
    "crossover_T",
]

REAL_MULTS_PER_COMPLEX = 4
COMPLEXITY_ALGORITHMS = ("LMMSE", "LocalLMMSE", "SB", "COMP", "LC", "EOMP", "LE")


@dataclass(frozen=True)
class ComplexityReport:
    algorithm: str
    B: int
    U: int
    K: int
    T: int
    preprocessing_mults: int
    equalization_mults: int
    fft_mults: int

    @property
    def total(self):
        return self.preprocessing_mults + self.equalization_mults + self.fft_mults

    def as_row(self):
        return {
            "algorithm": self.algorithm, "B": self.B, "U": self.U, "K": self.K, "T": self.T,
            "preprocessing_mults": self.preprocessing_mults,
            "equalization_mults": self.equalization_mults,
            "fft_mults": self.fft_mults,
            "total_mults": self.total,
        }


def _log2(B):
    return check_power_of_two(B).bit_length() - 1


def equalization_mults(U, K, T):
    """Applying a U x K (or K-per-row) equalizer to T vectors."""
    return REAL_MULTS_PER_COMPLEX * T * U * K


def fft_mults(B, U, T):
    """FFTs of the U channel columns and the T received vectors."""
    return (U + T) * 2 * B * _log2(B)


def _preprocessing(algorithm, B, U, K):
    if algorithm == "LocalLMMSE":
        return (-4 * U - 6) * K**3 + (4 * B * U + 8 * B + 2 * U) * K**2 + (
            8 * B * U - 12 * B + 4 * U - 6
        ) * K
    if algorithm == "SB":
        return 2 * B * U + 2 * U**3 + 6 * K * U**2 - 2 * (K + 1) * U
    if algorithm == "COMP":
        return (
            2 * U**3
            + (4 * B * K + 2 * K**2 + 12 * K - 4) * U**2
            + (2 * B + 2 * B * K - 2 * K**2 + 4 * K - 6) * U
        )
    if algorithm == "LC":
        return 6 * B * U + 2 * U**3 + 6 * K * U**2 - 2 * K * U - 2 * U
    if algorithm == "EOMP":
        return (
            2 * U**4
            + (6 * K - 4) * U**3
            + (3 * K**2 + (2 * B + 9) * K) * U**2
            + (2 * B * (K + 1) - K**2) * U
        )
    if algorithm == "LE":
        return 2 * U**4 + 2 * K * U**3 + (4 * K - 2) * U**2 + 2 * B * U
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {COMPLEXITY_ALGORITHMS}")


def _check_counts(B, U, K, T, algorithm):
    for name, value in (("U", U), ("T", T)):
        if not isinstance(value, Integral) or value < (1 if name == "U" else 0):
            raise ValueError(f"invalid {name}={value!r}")
    check_power_of_two(B)
    if algorithm == "LMMSE":
        return int(B), int(U), int(B), int(T)
    if not isinstance(K, Integral) or not 1 <= K <= B:
        raise ValueError(f"K must lie in [1, {B}], got {K!r}")
    return int(B), int(U), int(K), int(T)


def mult_count(algorithm, B, U, K, T):
    """Multiplication count for one coherence interval of T received vectors.

    ``"LMMSE"`` is the antenna-domain reference (no FFT, U x B equalizer;
    ``K`` is ignored). The beamspace algorithms report the equalization term
    ``4TUK`` and FFT term ``(U + T) 2B log2(B)`` separately from
    preprocessing.
    """
    if algorithm not in COMPLEXITY_ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {COMPLEXITY_ALGORITHMS}")
    B, U, K, T = _check_counts(B, U, K, T, algorithm)
    if algorithm == "LMMSE":
        pre = 2 * U**3 + 6 * B * U**2 - 2 * (B + 1) * U
        return ComplexityReport(algorithm, B, U, K, T, pre, equalization_mults(U, B, T), 0)
    pre = _preprocessing(algorithm, B, U, K)
    if pre < 0:
        raise ValueError(f"{algorithm} preprocessing count negative for B={B}, U={U}, K={K}")
    return ComplexityReport(
        algorithm, B, U, K, T, pre, equalization_mults(U, K, T), fft_mults(B, U, T)
    )


def cholesky_solve_count(U, K):
    """Cost of ``(H_S^H H_S + rho I)^{-1} H_S^H`` for a K x U ``H_S``."""
    if U < 1 or K < 1:
        raise ValueError("U and K must be >= 1")
    return 2 * U**3 + 6 * K * U**2 - (2 * K + 1) * U


def asymptotic_threshold(B, U):
    """Largest density (exclusive) at which beamspace can beat antenna-domain as T grows.

    A non-positive value means no density works: U is too small for B.
    """
    return 1.0 - _log2(B) / (2.0 * U)


def crossover_T(algorithm, B, U, K):
    """Smallest T with fewer multiplications than antenna-domain LMMSE, or None.

    Both counts are affine in T, so the crossover is solved exactly in integer
    arithmetic. Returns None when the beamspace per-T slope is not smaller.
    """
    at0 = mult_count(algorithm, B, U, K, 0).total
    at1 = mult_count(algorithm, B, U, K, 1).total
    ref0 = mult_count("LMMSE", B, U, K, 0).total
    ref1 = mult_count("LMMSE", B, U, K, 1).total
    slope, ref_slope = at1 - at0, ref1 - ref0
    if slope >= ref_slope:
        return None
    gap = at0 - ref0
    if gap < 0:
        return 0
    return gap // (ref_slope - slope) + 1
