"""Per-subcarrier channel generation for every BS-antenna/UE pair.

Links are classified into three propagation classes — indoor LOS, indoor
NLOS, and outdoor-to-indoor — each with power-law pathloss coefficients,
log-normal shadowing, and a per-wall penetration loss.  Small-scale fading
is a tapped delay line with exponentially decaying tap powers; LOS links
add a deterministic first tap with per-antenna steering phases and a Rice
factor.  Estimation errors are zero-mean proper complex Gaussian with a
variance proportional to the squared empirical mean coefficient magnitude
of the (site, UE) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .geometry import (
    ULA_OUTDOOR,
    BsSite,
    Deployment,
    FloorPlan,
    UeDrop,
    count_walls_batch,
    count_walls_pairwise,
    nearest_envelope_point,
)
from .units import SPEED_OF_LIGHT, db_to_linear

KIND_LOS = "los"
KIND_NLOS = "nlos"
KIND_OUTDOOR = "outdoor"


@dataclass(frozen=True)
class PathlossClass:
    """Power-law pathloss: a*log10(d_m) + b + c*log10(f_hz / 5 GHz)."""

    name: str
    a: float
    b: float
    c: float
    shadow_sigma_db: float


@dataclass(frozen=True)
class ChannelConfig:
    """Propagation-model coefficients.

    All values are configurable defaults, not measured constants: the
    indoor LOS/NLOS classes follow the usual indoor-office power laws, the
    outdoor-to-indoor class adds a building-entry constant on top of the
    NLOS law, and the delay spreads set the tap spacing of the fading
    model.
    """

    carrier_hz: float = 2.1e9
    los: PathlossClass = PathlossClass("A1-LOS", 18.7, 46.8, 20.0, 3.0)
    nlos: PathlossClass = PathlossClass("A1-NLOS", 36.8, 43.8, 20.0, 4.0)
    outdoor_entry_db: float = 14.0
    outdoor_shadow_sigma_db: float = 7.0
    wall_loss_db: float = 12.0
    rice_k_db: float = 7.0
    num_taps: int = 8
    los_delay_spread_s: float = 40e-9
    nlos_delay_spread_s: float = 25e-9
    outdoor_delay_spread_s: float = 45e-9
    min_distance_m: float = 1.0


@dataclass(frozen=True)
class LinkProfile:
    """Large-scale state of one (site, UE) link, frozen for a drop."""

    pathloss_db: float
    los: bool
    num_walls: int
    shadowing_db: float
    rice_k_linear: float
    distance_m: float
    kind: str

    @property
    def gain_linear(self) -> float:
        """Mean per-antenna channel power (pathloss plus shadowing)."""
        return float(db_to_linear(-(self.pathloss_db + self.shadowing_db)))


def pathloss_db(
    config: ChannelConfig, kind: str, distance_m: float, num_walls: int
) -> float:
    """Distance-law pathloss plus wall-penetration terms for one class."""
    d = max(float(distance_m), config.min_distance_m)
    if kind == KIND_LOS:
        cls, wall, entry = config.los, 0.0, 0.0
    elif kind == KIND_NLOS:
        cls = config.nlos
        wall = config.wall_loss_db * max(0, num_walls - 1)
        entry = 0.0
    elif kind == KIND_OUTDOOR:
        cls = config.nlos
        wall = config.wall_loss_db * num_walls
        entry = config.outdoor_entry_db
    else:
        raise ConfigurationError(f"unknown link kind {kind!r}")
    freq = cls.c * math.log10(config.carrier_hz / 5e9)
    return cls.a * math.log10(d) + cls.b + freq + wall + entry


def classify_links(
    plan: FloorPlan,
    site: BsSite,
    ue_positions: np.ndarray,
    config: ChannelConfig,
    rng: np.random.Generator,
) -> list[LinkProfile]:
    """Classify every (site, UE) link of one site in a single batch.

    Shadowing is drawn here once per link, so callers fix it per drop by
    calling this once per drop and reusing the profiles across fading
    realizations.
    """
    ue = np.atleast_2d(np.asarray(ue_positions, float))
    n = ue.shape[0]
    pos = site.position
    rice_linear = float(db_to_linear(config.rice_k_db))
    profiles: list[LinkProfile] = []
    if site.array_kind == ULA_OUTDOOR:
        wall_pts = np.array([nearest_envelope_point(plan, p) for p in ue])
        wall_3d = np.column_stack([wall_pts, ue[:, 2]])
        walls, _, _ = count_walls_pairwise(plan, wall_pts, ue[:, :2])
        d_out = np.linalg.norm(wall_3d - pos[None, :], axis=1)
        d_in = np.linalg.norm(ue - wall_3d, axis=1)
        dist = d_out + d_in
        shadow = rng.normal(0.0, config.outdoor_shadow_sigma_db, size=n)
        for j in range(n):
            profiles.append(
                LinkProfile(
                    pathloss_db=float(
                        pathloss_db(config, KIND_OUTDOOR, dist[j], int(walls[j]))
                    ),
                    los=False,
                    num_walls=int(walls[j]),
                    shadowing_db=float(shadow[j]),
                    rice_k_linear=0.0,
                    distance_m=float(dist[j]),
                    kind=KIND_OUTDOOR,
                )
            )
        return profiles
    walls, los, _ = count_walls_batch(plan, pos, ue)
    dist = np.linalg.norm(ue - pos[None, :], axis=1)
    for j in range(n):
        kind = KIND_LOS if los[j] else KIND_NLOS
        sigma = config.los.shadow_sigma_db if los[j] else config.nlos.shadow_sigma_db
        profiles.append(
            LinkProfile(
                pathloss_db=float(pathloss_db(config, kind, dist[j], int(walls[j]))),
                los=bool(los[j]),
                num_walls=int(walls[j]),
                shadowing_db=float(rng.normal(0.0, sigma)),
                rice_k_linear=rice_linear if los[j] else 0.0,
                distance_m=float(dist[j]),
                kind=kind,
            )
        )
    return profiles


def classify_link(
    plan: FloorPlan,
    site: BsSite,
    ue_position,
    config: ChannelConfig,
    rng: np.random.Generator,
) -> LinkProfile:
    """Single-link wrapper around :func:`classify_links`."""
    return classify_links(plan, site, np.asarray(ue_position, float)[None, :], config, rng)[0]


@dataclass(frozen=True, eq=False)
class ChannelTensor:
    """Complex coefficients h[k, m, f] with the per-site antenna partition.

    Row k across the antenna axis holds the entries of the k-th UE's
    channel vector; downstream consumers form h_k^H by conjugating.
    """

    coeffs: np.ndarray
    site_slices: tuple[slice, ...]
    subcarrier_freqs: np.ndarray
    realization_index: int
    seed: object

    @property
    def num_ues(self) -> int:
        return self.coeffs.shape[0]

    @property
    def num_antennas(self) -> int:
        return self.coeffs.shape[1]

    @property
    def num_subcarriers(self) -> int:
        return self.coeffs.shape[2]

    def hermitian_rows(self, f: int) -> np.ndarray:
        """(K, M) matrix whose k-th row is h_k^H at subcarrier f."""
        return self.coeffs[:, :, f].conj()


@dataclass(frozen=True, eq=False)
class NoisyChannelTensor:
    """Estimated coefficients h + e alongside the true tensor."""

    coeffs: np.ndarray
    nmse: float
    base: ChannelTensor

    @property
    def site_slices(self) -> tuple[slice, ...]:
        return self.base.site_slices

    def hermitian_rows(self, f: int) -> np.ndarray:
        return self.coeffs[:, :, f].conj()


def _tap_powers(num_taps: int) -> np.ndarray:
    p = np.exp(-0.5 * np.arange(num_taps))
    return p / p.sum()


def _delay_spread(config: ChannelConfig, kind: str) -> float:
    return {
        KIND_LOS: config.los_delay_spread_s,
        KIND_NLOS: config.nlos_delay_spread_s,
        KIND_OUTDOOR: config.outdoor_delay_spread_s,
    }[kind]


def generate_channel(
    profiles,
    deployment: Deployment,
    drop: UeDrop,
    config: ChannelConfig,
    subcarrier_offsets_hz,
    realization_index: int,
    seed,
) -> ChannelTensor:
    """One fading realization of the full K x M x F tensor.

    ``profiles`` is indexed [site][ue].  Tap t of the delay line sits at
    delay t * tau_rms / 2 with power proportional to exp(-t/2); the LOS
    class adds a deterministic flat tap with steering phases from the exact
    antenna-to-UE distances, weighted by the Rice factor.  Every link is
    scaled so its mean per-antenna power equals the profile's linear gain.
    """
    offsets = np.asarray(subcarrier_offsets_hz, float).ravel()
    num_f = offsets.size
    if num_f < 1:
        raise ConfigurationError("need at least one subcarrier")
    num_ues = drop.positions.shape[0]
    num_m = deployment.total_antennas
    rng = np.random.default_rng(seed)
    lam = SPEED_OF_LIGHT / config.carrier_hz
    taps = np.arange(config.num_taps)
    powers = _tap_powers(config.num_taps)
    amp = np.sqrt(powers)
    phase_for = {
        kind: np.exp(
            -2j
            * np.pi
            * np.outer(taps * (_delay_spread(config, kind) / 2.0), offsets)
        )
        for kind in (KIND_LOS, KIND_NLOS, KIND_OUTDOOR)
    }
    coeffs = np.empty((num_ues, num_m, num_f), np.complex128)
    for i, (site, rows) in enumerate(zip(deployment.sites, deployment.site_slices)):
        m_i = site.num_antennas
        for k in range(num_ues):
            prof = profiles[i][k]
            raw = rng.standard_normal((config.num_taps, m_i, 2))
            taps_iid = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
            h_nlos = np.einsum(
                "tm,tf->mf", amp[:, None] * taps_iid, phase_for[prof.kind]
            )
            k_lin = prof.rice_k_linear
            los_w = np.sqrt(k_lin / (k_lin + 1.0))
            nlos_w = np.sqrt(1.0 / (k_lin + 1.0))
            h = nlos_w * h_nlos
            if k_lin > 0.0:
                d_m = np.linalg.norm(
                    site.antenna_positions - drop.positions[k][None, :], axis=1
                )
                h = h + los_w * np.exp(-2j * np.pi * d_m / lam)[:, None]
            coeffs[k, rows, :] = np.sqrt(prof.gain_linear) * h
    return ChannelTensor(
        coeffs=coeffs,
        site_slices=deployment.site_slices,
        subcarrier_freqs=config.carrier_hz + offsets,
        realization_index=realization_index,
        seed=seed,
    )


def _mean_abs_per_site(tensor_coeffs: np.ndarray, site_slices) -> np.ndarray:
    """(num_sites, K) empirical mean |h| over each site's antennas and f."""
    return np.stack(
        [np.abs(tensor_coeffs[:, rows, :]).mean(axis=(1, 2)) for rows in site_slices]
    )


def sample_error_unit(shape: tuple[int, int, int], seed) -> np.ndarray:
    """Unit-variance proper complex Gaussian tensor for error injection."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(shape + (2,))
    return (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)


def apply_estimation_error(
    h: ChannelTensor, sigma_e2: float, unit: np.ndarray
) -> NoisyChannelTensor:
    """Scale a unit error tensor by the per-(site, UE) error std and add it.

    Sharing one ``unit`` draw across a sigma_e2 sweep yields paired
    (common-random-number) comparisons.
    """
    if sigma_e2 < 0:
        raise ValueError("sigma_e2 must be nonnegative")
    if sigma_e2 == 0.0:
        return NoisyChannelTensor(coeffs=h.coeffs, nmse=0.0, base=h)
    if unit.shape != h.coeffs.shape:
        raise ValueError("error tensor shape mismatch")
    mean_abs = _mean_abs_per_site(h.coeffs, h.site_slices)
    coeffs = h.coeffs.copy()
    scale = np.sqrt(sigma_e2)
    for i, rows in enumerate(h.site_slices):
        coeffs[:, rows, :] += (
            unit[:, rows, :] * (scale * mean_abs[i][:, None, None])
        )
    return NoisyChannelTensor(coeffs=coeffs, nmse=float(sigma_e2), base=h)


def add_estimation_error(h: ChannelTensor, sigma_e2: float, seed) -> NoisyChannelTensor:
    """Draw a fresh error tensor and add it to ``h``."""
    if sigma_e2 < 0:
        raise ValueError("sigma_e2 must be nonnegative")
    unit = sample_error_unit(h.coeffs.shape, seed)
    return apply_estimation_error(h, sigma_e2, unit)


def dump_tensor(path, coeffs: np.ndarray) -> None:
    """Write a K x M x F complex tensor as an ASCII header plus raw floats.

    Layout: one line ``K M F`` then little-endian float64 pairs
    (re, im) in C order.
    """
    arr = np.ascontiguousarray(coeffs, np.complex128)
    k, m, f = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"{k} {m} {f}\n".encode("ascii"))
        fh.write(arr.astype("<c16").tobytes())


def load_tensor(path) -> np.ndarray:
    """Read a tensor written by :func:`dump_tensor`."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        k, m, f = (int(v) for v in header)
        flat = np.frombuffer(fh.read(), dtype="<c16")
    if flat.size != k * m * f:
        raise ValueError("tensor payload does not match its header")
    return flat.reshape(k, m, f).astype(np.complex128)
