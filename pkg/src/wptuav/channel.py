"""Large-scale statistics and random realizations of every radio link.

Air-to-ground links (infrastructure to UAV) are spatially correlated Rician:
a deterministic line-of-sight steering vector plus Gaussian-local-scattering
correlated fading whose Rician factor decays with distance. Ground links
(terrestrial user to AP/BS) are Rayleigh with a three-slope path loss.

All statistics builders are vectorized over leading batch dimensions; the
per-link dataclasses are thin views used at the public API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import ScenarioConfig
from .geometry import Placement, Position

# Cluster nominal angles are drawn uniformly within this half-width around
# the geometric azimuth.
CLUSTER_HALF_WIDTH_RAD = np.deg2rad(40.0)

# Three-slope ground path loss constant table (distances in km inside logs):
#   d > D1:        PL_dB = PL_CONST_DB - 35*log10(d_km)
#   D0 < d <= D1:  PL_dB = PL_CONST_DB - 15*log10(D1_km) - 20*log10(d_km)
#   d <= D0:       PL_dB = PL_CONST_DB - 15*log10(D1_km) - 20*log10(D0_km)
# Continuous at both breakpoints by construction.
TUE_D0_M = 10.0
TUE_D1_M = 50.0
TUE_PL_CONST_DB = -140.72


@dataclass(frozen=True)
class LinkStatistics:
    """Second-order description of one infrastructure-to-UAV link."""

    zeta: float
    k_factor: float
    beta_los: float
    beta_nlos: float
    h_bar: np.ndarray  # (N,) complex LoS mean
    r: np.ndarray  # (N, N) complex Hermitian PSD scattering correlation


@dataclass(frozen=True)
class TueLinkStatistics:
    """Second-order description of one terrestrial-user-to-site link."""

    beta_te: float
    r_te: np.ndarray  # (N, N) complex Hermitian PSD


class LinkStatsArrays(NamedTuple):
    """Stacked per-link statistics, unpackable as (h_bar, r)."""

    h_bar: np.ndarray  # (..., S, N)
    r: np.ndarray  # (..., S, N, N)


def path_loss(uav: Position, ap: Position, height: float, beta0: float) -> float:
    """Free-space gain beta0 / (horizontal_distance^2 + H^2)."""
    dx = uav[0] - ap[0]
    dy = uav[1] - ap[1]
    denom = dx * dx + dy * dy + height * height
    if denom <= 0.0:
        raise ValueError("degenerate link: zero 3D distance")
    return beta0 / denom


def rician_factor(distance_3d):
    """K in linear scale: (13 - 0.03 * d) dB at 3D distance d meters."""
    d = np.asarray(distance_3d, dtype=float)
    return 10.0 ** ((13.0 - 0.03 * d) / 10.0)


def split_large_scale(zeta, k_linear):
    """LoS/NLoS large-scale parts sqrt(K/(K+1))*zeta and sqrt(1/(K+1))*zeta.

    The square-root weights are kept exactly as defined even though they do
    not sum to one; see the project notes on the source model.
    """
    z = np.asarray(zeta, dtype=float)
    k = np.asarray(k_linear, dtype=float)
    beta_los = np.sqrt(k / (k + 1.0)) * z
    beta_nlos = np.sqrt(1.0 / (k + 1.0)) * z
    return beta_los, beta_nlos


def los_steering(phi_rad, n_antennas: int, d_H: float, beta_los):
    """ULA steering vector scaled by sqrt(beta_los).

    h_bar[k] = sqrt(beta_los) * exp(j*2*pi*d_H*k*sin(phi)), k = 0..N-1.
    Broadcasts over leading dimensions of phi/beta_los.
    """
    phi = np.asarray(phi_rad, dtype=float)
    k = np.arange(n_antennas)
    phase = 2j * np.pi * d_H * np.sin(phi)[..., None] * k
    return np.sqrt(np.asarray(beta_los, dtype=float))[..., None] * np.exp(phase)


def scattering_correlation(nominal_aoas, asd_rad: float, n_antennas: int, beta_nlos):
    """Gaussian local scattering correlation for given cluster nominal AoAs.

    [R]_{s,m} = (beta_nlos / K_cl) * sum_k exp(j*pi*(s-m)*sin(phi_k)
                 - (asd_rad^2 / 2) * (pi*(s-m)*cos(phi_k))^2)

    nominal_aoas has shape (..., K_cl); the result is (..., N, N), exactly
    Hermitian with diagonal equal to beta_nlos.
    """
    phi = np.asarray(nominal_aoas, dtype=float)
    k_cl = phi.shape[-1]
    idx = np.arange(n_antennas)
    pd = np.pi * (idx[:, None] - idx[None, :])  # (N, N)
    sin_phi = np.sin(phi)[..., None, None, :]  # (..., 1, 1, K)
    cos_phi = np.cos(phi)[..., None, None, :]
    arg = 1j * pd[..., None] * sin_phi - 0.5 * (asd_rad**2) * (pd[..., None] * cos_phi) ** 2
    r = np.exp(arg).sum(axis=-1) / k_cl
    r = 0.5 * (r + np.conj(np.swapaxes(r, -1, -2)))  # bitwise-exact Hermitian
    b = np.asarray(beta_nlos, dtype=float)[..., None, None]
    return b * r


def nlos_correlation(
    phi_rad: float,
    n_antennas: int,
    asd_deg: float,
    n_clusters: int,
    beta_nlos: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Scattering correlation with freshly drawn cluster nominal AoAs.

    Cluster angles are uniform in [phi - 40deg, phi + 40deg].
    """
    offsets = rng.uniform(-CLUSTER_HALF_WIDTH_RAD, CLUSTER_HALF_WIDTH_RAD, size=n_clusters)
    return scattering_correlation(phi_rad + offsets, math.radians(asd_deg), n_antennas, beta_nlos)


def tue_path_loss_from_distance(distance_m):
    """Three-slope ground path loss gain (linear) at distance in meters."""
    d = np.asarray(distance_m, dtype=float)
    d1_km = TUE_D1_M / 1000.0
    d0_km = TUE_D0_M / 1000.0
    with np.errstate(divide="ignore"):
        log_d = np.log10(np.maximum(d, TUE_D0_M) / 1000.0)
    far = TUE_PL_CONST_DB - 35.0 * log_d
    mid = TUE_PL_CONST_DB - 15.0 * math.log10(d1_km) - 20.0 * log_d
    near = TUE_PL_CONST_DB - 15.0 * math.log10(d1_km) - 20.0 * math.log10(d0_km)
    pl_db = np.where(d > TUE_D1_M, far, np.where(d > TUE_D0_M, mid, near))
    out = 10.0 ** (pl_db / 10.0)
    return float(out) if np.isscalar(distance_m) or out.ndim == 0 else out


def tue_path_loss(tue: Position, ap: Position) -> float:
    """Three-slope gain between two ground nodes (horizontal distance)."""
    d = math.hypot(tue[0] - ap[0], tue[1] - ap[1])
    return float(tue_path_loss_from_distance(d))


def psd_sqrt(R: np.ndarray) -> np.ndarray:
    """Hermitian square root with tiny negative eigenvalues clamped to zero."""
    R = np.asarray(R)
    vals, vecs = np.linalg.eigh(R)
    trace = np.einsum("...ii->...", R).real
    floor = -1e-10 * np.maximum(trace, 1.0)
    if np.any(vals < floor[..., None]):
        raise ValueError("matrix is not positive semi-definite")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)[..., None, :]) @ np.conj(np.swapaxes(vecs, -1, -2))


def draw_channel(stats: LinkStatistics, rng: np.random.Generator, size=None) -> np.ndarray:
    """Draw g = h_bar + R^(1/2) w with w standard complex Gaussian.

    Returns (N,) for size=None, else size + (N,).
    """
    n = stats.h_bar.shape[-1]
    shape = (n,) if size is None else tuple(np.atleast_1d(size)) + (n,)
    w = complex_normal(rng, shape)
    a = psd_sqrt(stats.r)
    return stats.h_bar + np.einsum("ij,...j->...i", a, w)


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) i.i.d. samples of the given shape."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def link_statistics(
    uav: Position,
    site: Position,
    height: float,
    n_antennas: int,
    d_H: float,
    asd_deg: float,
    beta0: float,
    cluster_offsets: np.ndarray,
) -> LinkStatistics:
    """Assemble one link's statistics from geometry and frozen cluster offsets."""
    zeta = path_loss(uav, site, height, beta0)
    dist_h = math.hypot(uav[0] - site[0], uav[1] - site[1])
    k = float(rician_factor(math.hypot(dist_h, height)))
    beta_los, beta_nlos = split_large_scale(zeta, k)
    phi = math.atan2(uav[1] - site[1], uav[0] - site[0])
    h_bar = los_steering(phi, n_antennas, d_H, float(beta_los))
    r = scattering_correlation(
        phi + np.asarray(cluster_offsets), math.radians(asd_deg), n_antennas, float(beta_nlos)
    )
    return LinkStatistics(
        zeta=float(zeta),
        k_factor=k,
        beta_los=float(beta_los),
        beta_nlos=float(beta_nlos),
        h_bar=h_bar,
        r=r,
    )


class ScenarioRealization:
    """One placement plus its frozen scattering geometry.

    Cluster nominal AoAs are geometric azimuth plus per-(site, cluster)
    offsets drawn once here and then frozen, so statistics vary smoothly as
    the UAV moves. All draws happen unconditionally in a fixed order so the
    realization is bitwise identical across feature flags.
    """

    def __init__(self, config: ScenarioConfig, placement: Placement, rng: np.random.Generator):
        self.config = config
        self.placement = placement
        k_cl = config.n_clusters
        w = CLUSTER_HALF_WIDTH_RAD
        self.ap_cluster_offsets = rng.uniform(-w, w, size=(config.L, k_cl))
        self.bs_cluster_offsets = rng.uniform(-w, w, size=(1, k_cl))
        self.tue_ap_cluster_offsets = rng.uniform(-w, w, size=(config.L, k_cl))
        self.tue_bs_cluster_offsets = rng.uniform(-w, w, size=(1, k_cl))
        self._tue_ap_stats: np.ndarray | None = None
        self._tue_bs_stats: np.ndarray | None = None

    # -- air-to-ground statistics -------------------------------------------------

    def _uav_site_stats(self, positions, sites_xy, offsets, n_ant) -> LinkStatsArrays:
        cfg = self.config
        pos = np.asarray(positions, dtype=float)
        sites = np.asarray(sites_xy, dtype=float)
        delta = pos[..., None, :] - sites  # (..., S, 2)
        dh2 = delta[..., 0] ** 2 + delta[..., 1] ** 2
        zeta = cfg.beta0 / (dh2 + cfg.H**2)
        k = rician_factor(np.sqrt(dh2 + cfg.H**2))
        beta_los, beta_nlos = split_large_scale(zeta, k)
        phi = np.arctan2(delta[..., 1], delta[..., 0])
        h_bar = los_steering(phi, n_ant, cfg.d_H, beta_los)
        nominal = phi[..., None] + offsets  # (..., S, K)
        r = scattering_correlation(nominal, math.radians(cfg.asd_deg), n_ant, beta_nlos)
        return LinkStatsArrays(h_bar=h_bar, r=r)

    def uav_stats(self, positions) -> LinkStatsArrays:
        """Per-AP statistics at UAV position(s): (..., L, N) / (..., L, N, N)."""
        return self._uav_site_stats(
            positions, self.placement.ap_positions, self.ap_cluster_offsets, self.config.N
        )

    def bs_stats(self, positions) -> LinkStatsArrays:
        """Stacked BS statistics at UAV position(s): (..., 1, LN) / (..., 1, LN, LN)."""
        bs = np.asarray([self.placement.bs_position], dtype=float)
        n_tot = self.config.L * self.config.N
        return self._uav_site_stats(positions, bs, self.bs_cluster_offsets, n_tot)

    def uav_ap_statistics(self, position: Position) -> list[LinkStatistics]:
        """Per-link dataclass view of uav_stats at one position."""
        arr = self.uav_stats(np.asarray(position, dtype=float))
        out = []
        for l in range(self.config.L):
            ap = self.placement.ap_positions[l]
            zeta = path_loss(position, Position(ap[0], ap[1]), self.config.H, self.config.beta0)
            dist_h = math.hypot(position[0] - ap[0], position[1] - ap[1])
            k = float(rician_factor(math.hypot(dist_h, self.config.H)))
            beta_los, beta_nlos = split_large_scale(zeta, k)
            out.append(
                LinkStatistics(
                    zeta=float(zeta),
                    k_factor=k,
                    beta_los=float(beta_los),
                    beta_nlos=float(beta_nlos),
                    h_bar=arr.h_bar[l],
                    r=arr.r[l],
                )
            )
        return out

    def bs_statistics(self, position: Position) -> LinkStatistics:
        """Single stacked-link dataclass view of bs_stats at one position."""
        arr = self.bs_stats(np.asarray(position, dtype=float))
        bs = self.placement.bs_position
        zeta = path_loss(position, bs, self.config.H, self.config.beta0)
        dist_h = math.hypot(position[0] - bs[0], position[1] - bs[1])
        k = float(rician_factor(math.hypot(dist_h, self.config.H)))
        beta_los, beta_nlos = split_large_scale(zeta, k)
        return LinkStatistics(
            zeta=float(zeta),
            k_factor=k,
            beta_los=float(beta_los),
            beta_nlos=float(beta_nlos),
            h_bar=arr.h_bar[0],
            r=arr.r[0],
        )

    # -- terrestrial-user statistics (static, cached) ------------------------------

    def _tue_site_stats(self, sites_xy, offsets, n_ant) -> np.ndarray:
        cfg = self.config
        tue = np.asarray(self.placement.tue_position, dtype=float)
        sites = np.asarray(sites_xy, dtype=float)
        delta = tue - sites  # (S, 2)
        dist = np.hypot(delta[..., 0], delta[..., 1])
        beta_te = tue_path_loss_from_distance(dist)
        phi = np.arctan2(delta[..., 1], delta[..., 0])
        nominal = phi[..., None] + offsets
        return scattering_correlation(nominal, math.radians(cfg.asd_deg), n_ant, beta_te)

    def tue_ap_stats(self) -> np.ndarray:
        """Per-AP TUE scattering correlation (L, N, N); Rayleigh so the mean is zero."""
        if self._tue_ap_stats is None:
            self._tue_ap_stats = self._tue_site_stats(
                self.placement.ap_positions, self.tue_ap_cluster_offsets, self.config.N
            )
        return self._tue_ap_stats

    def tue_bs_stats(self) -> np.ndarray:
        """Stacked TUE-to-BS correlation (1, LN, LN)."""
        if self._tue_bs_stats is None:
            bs = np.asarray([self.placement.bs_position], dtype=float)
            self._tue_bs_stats = self._tue_site_stats(
                bs, self.tue_bs_cluster_offsets, self.config.L * self.config.N
            )
        return self._tue_bs_stats

    def tue_ap_statistics(self) -> list[TueLinkStatistics]:
        arr = self.tue_ap_stats()
        out = []
        for l in range(self.config.L):
            r = arr[l]
            out.append(TueLinkStatistics(beta_te=float(np.trace(r).real / r.shape[0]), r_te=r))
        return out
