"""Synthetic sparse mmWave channels, channel files and pilot-based LS estimation.

The propagation model is a geometric ray sum over a half-wavelength ULA.
Each user sees either one dominant path plus two weak scatterers (``"LoS"``,
10 dB power ratio) or eight equal-power paths (``"nonLoS"``). Columns are
normalized so that ``E[||h_u||^2] = B``; path loss is assumed to be removed
by power control, so user distances are drawn and reported but do not scale
the gains.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_channel, check_complex_matrix, check_power_of_two
from .exceptions import DimensionError, DomainError, PilotError, PlacementError
from .numerics import beamspace_transform, dft_matrix, inverse_beamspace_transform

__all__ = [
    "ChannelMatrix",
    "ChannelProfile",
    "LOS",
    "NLOS",
    "steering_vector",
    "generate_channel",
    "to_beamspace",
    "to_antenna",
    "ls_channel_estimate",
    "unitary_pilots",
    "save_channel",
    "load_channel",
    "top_k_energy_fraction",
]

DOMAINS = ("antenna", "beamspace")


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex B x U channel tagged with its domain."""

    data: np.ndarray
    domain: str = "antenna"
    user_angles: np.ndarray = field(default=None, compare=False, repr=False)
    user_distances: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise DomainError(f"unknown domain {self.domain!r}")
        data = check_channel(self.data, domain=None).copy()
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def B(self):
        return self.data.shape[0]

    @property
    def U(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def to_beamspace(self):
        return to_beamspace(self)

    def to_antenna(self):
        return to_antenna(self)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.data, dtype=dtype)


@dataclass(frozen=True)
class ChannelProfile:
    scenario: str = "LoS"
    paths_per_user: int = 3
    sector_deg: float = 120.0
    min_distance_m: float = 10.0
    max_distance_m: float = 110.0
    min_separation_deg: float = 1.0
    los_power_ratio_db: float = 10.0
    carrier_ghz: float = 60.0  # metadata only

    def __post_init__(self):
        if self.scenario not in ("LoS", "nonLoS"):
            raise ValueError(f"scenario must be 'LoS' or 'nonLoS', got {self.scenario!r}")
        if self.paths_per_user < 1:
            raise ValueError("paths_per_user must be >= 1")
        if not 0 <= self.sector_deg <= 180:
            raise ValueError("sector_deg must lie in [0, 180]")
        if self.min_separation_deg < 0 or not 0 < self.min_distance_m <= self.max_distance_m:
            raise ValueError("invalid separation or distance range")

    def path_powers(self):
        """Per-path average powers, summing to one."""
        L = self.paths_per_user
        if self.scenario == "nonLoS" or L == 1:
            return np.full(L, 1.0 / L)
        ratio = 10.0 ** (self.los_power_ratio_db / 10.0)
        dominant = ratio / (ratio + 1.0)
        return np.concatenate([[dominant], np.full(L - 1, (1.0 - dominant) / (L - 1))])


LOS = ChannelProfile("LoS", paths_per_user=3)
NLOS = ChannelProfile("nonLoS", paths_per_user=8)


def steering_vector(B, theta):
    """ULA response with half-wavelength spacing, ``exp(j*pi*b*sin(theta))``."""
    return np.exp(1j * np.pi * np.arange(B) * np.sin(theta))


def _place_users(U, profile, rng):
    """Uniform angles in the sector with pairwise separation >= min_separation."""
    width = profile.sector_deg
    sep = profile.min_separation_deg
    slack = width - (U - 1) * sep
    if slack < 0:
        raise PlacementError(
            f"cannot place {U} users {sep} deg apart in a {width} deg sector"
        )
    offsets = np.sort(rng.uniform(0.0, slack, size=U)) + sep * np.arange(U)
    angles = offsets - width / 2.0
    return np.deg2rad(rng.permutation(angles))


def generate_channel(B, U, profile=LOS, seed=0):
    """Draw an antenna-domain channel from the geometric ray-sum model.

    The dominant LoS path has deterministic magnitude and a random phase; the
    remaining paths have circularly-symmetric Gaussian gains and angles drawn
    uniformly across the sector. Deterministic given ``seed``.
    """
    check_power_of_two(B)
    if not 1 <= U <= B:
        raise DimensionError(f"need 1 <= U <= B, got U={U}, B={B}")
    rng = np.random.default_rng(seed)
    user_angles = _place_users(U, profile, rng)
    distances = rng.uniform(profile.min_distance_m, profile.max_distance_m, size=U)
    powers = profile.path_powers()
    L = len(powers)
    half = np.deg2rad(profile.sector_deg) / 2.0

    H = np.empty((B, U), dtype=np.complex128)
    for u in range(U):
        gains = np.sqrt(powers / 2.0) * (rng.standard_normal(L) + 1j * rng.standard_normal(L))
        angles = rng.uniform(-half, half, size=L)
        angles[0] = user_angles[u]
        if profile.scenario == "LoS":
            gains[0] = np.sqrt(powers[0]) * np.exp(2j * np.pi * rng.uniform())
            weak = np.sum(np.abs(gains[1:]) ** 2)
            if weak > powers[0]:
                gains[1:] *= np.sqrt(powers[0] / weak)
        H[:, u] = gains @ steering_vector(B, angles[:, None])
    return ChannelMatrix(H, "antenna", user_angles=user_angles, user_distances=distances)


def _as_channel(H, domain):
    if isinstance(H, ChannelMatrix):
        if H.domain != domain:
            raise DomainError(f"expected a {domain} channel, got {H.domain}")
        return H
    return ChannelMatrix(H, domain)


def to_beamspace(H_bar):
    H_bar = _as_channel(H_bar, "antenna")
    return ChannelMatrix(beamspace_transform(H_bar.data, axis=0), "beamspace")


def to_antenna(H):
    H = _as_channel(H, "beamspace")
    return ChannelMatrix(inverse_beamspace_transform(H.data, axis=0), "antenna")


def unitary_pilots(U):
    """Orthogonal pilot sequences: the U x U unitary DFT matrix."""
    return dft_matrix(U)


def ls_channel_estimate(Y_pilot, P, domain="antenna"):
    """Least-squares channel estimate ``Y_pilot P^H`` for unitary pilots ``P``."""
    Y = check_complex_matrix(Y_pilot, "Y_pilot")
    P = check_complex_matrix(P, "pilot matrix")
    U = P.shape[0]
    if P.shape != (U, U) or Y.shape[1] != U:
        raise DimensionError(f"pilot shape {P.shape} incompatible with Y_pilot {Y.shape}")
    if np.max(np.abs(P @ P.conj().T - np.eye(U))) > 1e-10:
        raise PilotError("pilot matrix must be unitary")
    return ChannelMatrix(Y @ P.conj().T, domain)


def top_k_energy_fraction(H, K):
    """Per-column fraction of energy captured by the K largest-magnitude entries."""
    H = np.asarray(H)
    power = np.sort(np.abs(H) ** 2, axis=0)[::-1]
    return power[:K].sum(axis=0) / power.sum(axis=0)


def save_channel(path, H):
    """Write ``H`` in the text channel format (``B U domain`` header, ``re:im`` entries)."""
    if not isinstance(H, ChannelMatrix):
        H = ChannelMatrix(H, "antenna")
    lines = [f"{H.B} {H.U} {H.domain}"]
    for row in H.data:
        lines.append(" ".join(f"{z.real:.17g}:{z.imag:.17g}" for z in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_channel(path):
    text = Path(path).read_text().split("\n")
    rows = [line for line in text if line.strip()]
    if not rows:
        raise ValueError(f"{path}: empty channel file")
    header = rows[0].split()
    if len(header) != 3:
        raise ValueError(f"{path}:1: expected 'B U domain', got {rows[0]!r}")
    try:
        B, U = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"{path}:1: B and U must be integers") from None
    if header[2] not in DOMAINS:
        raise ValueError(f"{path}:1: unknown domain {header[2]!r}")
    if len(rows) - 1 != B:
        raise DimensionError(f"{path}: expected {B} data rows, found {len(rows) - 1}")
    H = np.empty((B, U), dtype=np.complex128)
    for b, line in enumerate(rows[1:]):
        fields = line.split()
        if len(fields) != U:
            raise DimensionError(f"{path}:{b + 2}: expected {U} entries, found {len(fields)}")
        for u, entry in enumerate(fields):
            try:
                re, im = entry.split(":")
                H[b, u] = complex(float(re), float(im))
            except ValueError:
                raise ValueError(f"{path}:{b + 2}: malformed entry {entry!r}") from None
    if not np.all(np.isfinite(H)):
        raise ValueError(f"{path}: non-finite entries")
    return ChannelMatrix(H, header[2])
