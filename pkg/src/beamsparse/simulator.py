"""Monte-Carlo uplink BER simulation over block-fading synthetic channels.

SNR convention: per-receive-antenna SNR ``E_s / N0`` with ``E_s = 1`` and
channel columns normalized to ``E[||h_u||^2] = B``. The equalizer
regularizer is ``rho = N0 / E_s`` at every SNR point.

Within one coherence block every (algorithm, density) cell sees the same
channel, pilots, data and unit-variance noise draw; only the noise scale
changes across SNR points. The comparisons between cells are therefore
paired.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from ._validation import check_power_of_two, density_to_beams
from .channel import (
    LOS,
    ChannelProfile,
    generate_channel,
    ls_channel_estimate,
    to_beamspace,
    unitary_pilots,
)
from .equalizers import apply_equalizer, build_equalizer, greedy_path
from .exceptions import DimensionError

__all__ = [
    "QAM16_POINTS",
    "SimConfig",
    "BerCurve",
    "OperatingPoint",
    "DeltaMinResult",
    "modulate",
    "demodulate",
    "qam16_ber_awgn",
    "noise_variance",
    "run_trial",
    "ber_curves",
    "ber_curve",
    "snr_operating_point",
    "delta_min_search",
    "operating_points",
]

BITS_PER_SYMBOL = 4
_PAM_LEVELS = np.array([-3.0, -1.0, 3.0, 1.0])  # indexed by 2-bit label, Gray order
_SCALE = 1.0 / math.sqrt(10.0)


def _labels_to_points():
    labels = np.arange(16)
    i_bits, q_bits = labels >> 2, labels & 3
    return _SCALE * (_PAM_LEVELS[i_bits] + 1j * _PAM_LEVELS[q_bits])


QAM16_POINTS = _labels_to_points()


def modulate(bits):
    """Gray-mapped 16-QAM with unit average energy; 4 bits per symbol, MSB first."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[0] % BITS_PER_SYMBOL:
        raise DimensionError(f"bit count {bits.shape[0]} is not a multiple of 4")
    groups = bits.reshape(-1, BITS_PER_SYMBOL, *bits.shape[1:])
    labels = 8 * groups[:, 0] + 4 * groups[:, 1] + 2 * groups[:, 2] + groups[:, 3]
    return QAM16_POINTS[labels]


def _slice_pam(x):
    # level index 0..3 for -3, -1, 1, 3 mapped back to the Gray label
    level = np.clip(np.floor(x / (2 * _SCALE)) + 2, 0, 3).astype(np.int64)
    return np.array([0, 1, 3, 2])[level]


def demodulate(symbols):
    """Hard minimum-distance decisions, inverse of :func:`modulate`."""
    symbols = np.asarray(symbols)
    i_lab, q_lab = _slice_pam(symbols.real), _slice_pam(symbols.imag)
    bits = np.stack([i_lab >> 1, i_lab & 1, q_lab >> 1, q_lab & 1], axis=1)
    return bits.reshape(-1, *symbols.shape[1:])


def _qfunc(x):
    return 0.5 * erfc(x / math.sqrt(2.0))


def qam16_ber_awgn(snr_db):
    """Exact bit error rate of Gray 16-QAM over AWGN at ``E_s/N0 = snr_db``."""
    snr = 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)
    d = np.sqrt(snr / 5.0)
    return 0.25 * (3 * _qfunc(d) + 2 * _qfunc(3 * d) - _qfunc(5 * d))


def noise_variance(snr_db, Es=1.0):
    return Es / 10.0 ** (snr_db / 10.0)


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def run_trial(H_bar, W, snr_db, rng, n_vectors=1):
    """Send ``n_vectors`` random 16-QAM vectors through ``H_bar`` and equalize with ``W``.

    Returns ``(bit_errors, bit_count)``. ``snr_db = inf`` gives a noiseless link.
    """
    H_bar = np.asarray(H_bar)
    B, U = H_bar.shape
    if W.n_beams != B or W.n_users != U:
        raise DimensionError(f"equalizer is {W.n_users}x{W.n_beams}, channel is {B}x{U}")
    bits = rng.integers(0, 2, size=(BITS_PER_SYMBOL * U, n_vectors))
    s = modulate(bits)
    y_bar = H_bar @ s
    if np.isfinite(snr_db):
        y_bar = y_bar + math.sqrt(noise_variance(snr_db)) * _complex_normal(rng, y_bar.shape)
    y = np.fft.fft(y_bar, axis=0, norm="ortho")
    detected = demodulate(apply_equalizer(W, y))
    return int(np.count_nonzero(detected != bits)), bits.size


@dataclass(frozen=True)
class SimConfig:
    B: int = 128
    U: int = 16
    snr_grid: tuple = tuple(range(-12, 13, 2))
    delta_grid: tuple = (0.0625, 0.125, 0.25, 0.5, 1.0)
    trials: int = 100
    block_length: int = 100
    seed: int = 0
    profile: ChannelProfile = LOS
    csi: str = "estimated"
    modulation: str = "16qam"
    target_ber: float = 1e-2
    gap_db: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "snr_grid", tuple(float(s) for s in self.snr_grid))
        object.__setattr__(self, "delta_grid", tuple(float(d) for d in self.delta_grid))
        check_power_of_two(self.B)
        if not 1 <= self.U <= self.B:
            raise ValueError(f"need 1 <= U <= B, got U={self.U}, B={self.B}")
        if self.trials < 1 or self.block_length < 1:
            raise ValueError("trials and block_length must be >= 1")
        if not self.snr_grid or np.any(np.diff(self.snr_grid) <= 0):
            raise ValueError("snr_grid must be non-empty and strictly increasing")
        for d in self.delta_grid:
            density_to_beams(d, self.B)
        if self.csi not in ("estimated", "perfect"):
            raise ValueError(f"csi must be 'estimated' or 'perfect', got {self.csi!r}")
        if self.modulation != "16qam":
            raise ValueError(f"unsupported modulation {self.modulation!r}")
        if not 0 < self.target_ber < 0.5:
            raise ValueError("target_ber must lie in (0, 0.5)")

    def n_beams(self, delta):
        return density_to_beams(delta, self.B)


@dataclass
class BerCurve:
    algorithm: str
    delta: float
    K: int
    snr_db: np.ndarray
    bit_errors: np.ndarray
    bit_count: np.ndarray

    @property
    def ber(self):
        return self.bit_errors / self.bit_count

    @property
    def sigma(self):
        """Binomial standard deviation of each BER sample."""
        p = self.ber
        return np.sqrt(p * (1 - p) / self.bit_count)


@dataclass(frozen=True)
class OperatingPoint:
    algorithm: str
    delta: float
    K: int
    target_ber: float
    snr_db: float
    reachable: bool
    snr_db_low: float = field(default=math.nan, compare=False)
    snr_db_high: float = field(default=math.nan, compare=False)

    @property
    def effective_snr_db(self):
        """Operating SNR, with an unreachable target counted as +inf."""
        return self.snr_db if self.reachable else math.inf


@dataclass(frozen=True)
class DeltaMinResult:
    algorithm: str
    gap_db: float
    delta_min: float
    K_min: int
    lmmse_snr_db: float
    diagnostics: str = ""

    @property
    def found(self):
        return self.delta_min is not None


def _cells(config, algorithms, deltas=None):
    deltas = config.delta_grid if deltas is None else tuple(float(d) for d in deltas)
    cells = []
    for alg in algorithms:
        for d in ((1.0,) if alg == "LMMSE" else deltas):
            cells.append((alg, d, config.n_beams(d)))
    return cells


def _block_seed(seed, block):
    return np.random.SeedSequence([seed, block])


def _simulate_block(config, cells, block):
    """Bit-error counts, shape (n_cells, n_snr), for one coherence block."""
    ss = _block_seed(config.seed, block)
    chan_seed, data_seed = ss.spawn(2)
    B, U, T = config.B, config.U, config.block_length
    H_bar = generate_channel(B, U, config.profile, seed=chan_seed).data
    rng = np.random.default_rng(data_seed)
    P = unitary_pilots(U)
    pilot_noise = _complex_normal(rng, (B, U))
    bits = rng.integers(0, 2, size=(BITS_PER_SYMBOL * U, T))
    s = modulate(bits)
    noise = _complex_normal(rng, (B, T))
    rx_clean = np.fft.fft(H_bar @ s, axis=0, norm="ortho")
    noise_b = np.fft.fft(noise, axis=0, norm="ortho")
    H_true = to_beamspace(H_bar).data

    errors = np.zeros((len(cells), len(config.snr_grid)), dtype=np.int64)
    for j, snr in enumerate(config.snr_grid):
        N0 = noise_variance(snr)
        if config.csi == "perfect":
            H = H_true
        else:
            # pilot symbols at full energy: sqrt(U) P with P unitary
            y_pilot = math.sqrt(U) * H_bar @ P + math.sqrt(N0) * pilot_noise
            H = to_beamspace(ls_channel_estimate(y_pilot / math.sqrt(U), P)).data
        y = rx_clean + math.sqrt(N0) * noise_b
        for i, W in enumerate(_equalizers(cells, H, N0)):
            errors[i, j] = np.count_nonzero(demodulate(apply_equalizer(W, y)) != bits)
    return errors


def _equalizers(cells, H, rho):
    """One equalizer per cell; greedy algorithms share a single run up to their largest K."""
    paths = {}
    for alg in ("COMP", "EOMP"):
        Ks = [K for a, _, K in cells if a == alg]
        if Ks:
            paths[alg] = greedy_path(alg, H, rho, Ks)
    for alg, _, K in cells:
        yield paths[alg][K] if alg in paths else build_equalizer(alg, H, rho, K)


def _run_blocks(args):
    config, cells, blocks = args
    return sum(_simulate_block(config, cells, b) for b in blocks)


def ber_curves(config, algorithms, deltas=None, workers=1):
    """BER curves for every (algorithm, density) cell, keyed by ``(algorithm, delta)``.

    ``"LMMSE"`` is run once at density 1. Blocks are seeded from
    ``(config.seed, block_index)``, so the result does not depend on
    ``workers``.
    """
    cells = _cells(config, algorithms, deltas)
    blocks = list(range(config.trials))
    if workers > 1:
        chunks = [blocks[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_blocks, [(config, cells, c) for c in chunks if c]))
        errors = sum(parts)
    else:
        errors = _run_blocks((config, cells, blocks))
    bits_per_point = config.trials * config.block_length * BITS_PER_SYMBOL * config.U
    snr = np.array(config.snr_grid)
    return {
        (alg, d): BerCurve(alg, d, K, snr, errors[i], np.full(len(snr), bits_per_point))
        for i, (alg, d, K) in enumerate(cells)
    }


def ber_curve(config, algorithm, delta=1.0, workers=1):
    curves = ber_curves(config, [algorithm], [delta], workers)
    return next(iter(curves.values()))


def _crossing(snr, ber, target, floor):
    """Log-linear interpolation at the first downward crossing of ``target``."""
    if len(snr) < 2:
        raise ValueError("need at least two samples")
    if ber[0] <= target:
        return math.nan
    logb = np.log10(np.maximum(ber, floor))
    for i in range(1, len(snr)):
        if ber[i] <= target:
            t = (math.log10(target) - logb[i - 1]) / (logb[i] - logb[i - 1])
            return float(snr[i - 1] + t * (snr[i] - snr[i - 1]))
    return math.nan


def snr_operating_point(curve, target=1e-2, n_sigma=3.0):
    """SNR at which ``curve`` reaches ``target`` BER.

    Interpolates log10(BER) linearly in SNR between the two grid points that
    bracket the first crossing. Zero-error samples are floored at half an
    error. The target is unreachable when the curve starts at or below it or
    never gets there. ``snr_db_low``/``snr_db_high`` repeat the interpolation
    on the BER -/+ ``n_sigma`` binomial bands.
    """
    snr = np.asarray(curve.snr_db, dtype=float)
    ber = np.asarray(curve.ber, dtype=float)
    floor = 0.5 / float(np.max(curve.bit_count))
    mid = _crossing(snr, ber, target, floor)
    sigma = curve.sigma
    low = _crossing(snr, np.clip(ber - n_sigma * sigma, 0, None), target, floor)
    high = _crossing(snr, ber + n_sigma * sigma, target, floor)
    reachable = not math.isnan(mid)
    return OperatingPoint(
        curve.algorithm, curve.delta, curve.K, target, mid, reachable,
        snr_db_low=low if reachable else math.nan,
        snr_db_high=(high if not math.isnan(high) else math.inf) if reachable else math.nan,
    )


def operating_points(curves, target=1e-2):
    return {key: snr_operating_point(c, target) for key, c in curves.items()}


def delta_min_search(config, algorithm, curves=None, workers=1):
    """Smallest grid density whose operating point is within ``gap_db`` of exact LMMSE."""
    if 1.0 not in config.delta_grid:
        raise ValueError("delta grid must contain 1")
    if curves is None:
        curves = ber_curves(config, ["LMMSE", algorithm], workers=workers)
    ref = snr_operating_point(curves[("LMMSE", 1.0)], config.target_ber)
    if not ref.reachable:
        return DeltaMinResult(
            algorithm, config.gap_db, None, None, math.nan,
            "LMMSE reference does not cross the target BER within the SNR grid",
        )
    limit = ref.snr_db + config.gap_db
    tried = []
    for d in sorted(config.delta_grid):
        op = snr_operating_point(curves[(algorithm, d)], config.target_ber)
        tried.append(f"{d:g}:{op.effective_snr_db:.3f}")
        if op.effective_snr_db <= limit:
            return DeltaMinResult(algorithm, config.gap_db, d, op.K, ref.snr_db)
    return DeltaMinResult(
        algorithm, config.gap_db, None, None, ref.snr_db,
        f"no density within {config.gap_db} dB of {ref.snr_db:.3f} dB; tried " + ", ".join(tried),
    )
