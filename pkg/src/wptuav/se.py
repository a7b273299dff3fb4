"""Uplink spectral efficiency under the three network architectures.

The distributed architecture with matched-filter combining and equal-weight
fusion admits a closed form in the link statistics.  Optimal fusion weights
across receivers (a second combining layer on the per-receiver scalars)
admit a closed form as well.  The single-serving-receiver and co-located
architectures use the instantaneous-estimate SINR averaged over estimate
draws.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import LinkStatistics, TueLinkStatistics, complex_normal, psd_sqrt
from .energy import mixed_moment, upsilon_and_b
from .estimation import EstimationMatrices


def prelog(tau_c: float, tau_p: float, tau_e: float) -> float:
    """Fraction of the block carrying uplink data."""
    return (tau_c - tau_p - tau_e) / tau_c


@dataclass(frozen=True)
class SeTermBreakdown:
    """Numerator and denominator terms of the closed-form effective SINR."""

    ds: float
    bu: float
    hi: float
    ui: float
    ns: float

    @property
    def sinr(self) -> float:
        return self.ds / (self.bu + self.hi + self.ui + self.ns)


def se_terms_from_arrays(h_bar, r, q, p_u, kappa: float, sigma2: float,
                         r_te=None, p_te_u: float = 0.0):
    """Closed-form SINR terms, batched over leading axes of the link stack.

    h_bar (..., L, N), r and q (..., L, N, N); the link axis is summed.
    Returns (ds, bu, hi, ui, ns) arrays of shape (...,).
    """
    ups, b = upsilon_and_b(h_bar, r, q)
    sum_b = np.sum(b, axis=-1)
    sum_ups = np.sum(ups, axis=-1)
    p_u = np.asarray(p_u)
    ds = kappa * p_u * sum_b**2
    bu = kappa * p_u * sum_ups
    hi = (1.0 - kappa) * p_u * (sum_ups + sum_b**2)
    ns = sigma2 * sum_b
    if r_te is not None and p_te_u > 0.0:
        ui = p_te_u * np.sum(mixed_moment(r_te, q, h_bar), axis=-1)
    else:
        ui = np.zeros_like(ds)
    return ds, bu, hi, ui, ns


def se_cf_closed_form(stats: Sequence[LinkStatistics],
                      mats: Sequence[EstimationMatrices],
                      p_u: float, kappa: float, sigma2: float,
                      tau_c: float, tau_p: float, tau_e: float,
                      tue_stats: Sequence[TueLinkStatistics] | None = None,
                      p_te_u: float = 0.0) -> tuple[float, SeTermBreakdown]:
    """Closed-form SE of the distributed architecture with equal fusion."""
    h_bar = np.stack([s.h_bar for s in stats])
    r = np.stack([s.r for s in stats])
    q = np.stack([m.q for m in mats])
    r_te = np.stack([t.r_te for t in tue_stats]) if tue_stats is not None else None
    ds, bu, hi, ui, ns = se_terms_from_arrays(h_bar, r, q, p_u, kappa, sigma2,
                                              r_te=r_te, p_te_u=p_te_u)
    terms = SeTermBreakdown(ds=float(ds), bu=float(bu), hi=float(hi),
                            ui=float(ui), ns=float(ns))
    pre = prelog(tau_c, tau_p, tau_e)
    denom = terms.bu + terms.hi + terms.ui + terms.ns
    sinr = terms.ds / denom if denom > 0.0 else 0.0
    return pre * np.log2(1.0 + sinr), terms


def expected_log_sinr(h_bar, q, c, p_u: float, kappa: float, sigma2: float,
                      rng: np.random.Generator, n_draws: int,
                      r_te=None, p_te_u: float = 0.0) -> np.ndarray:
    """E{log2(1 + SINR)} per link from estimate draws.

    h_bar (L, N), q and c (L, N, N).  The estimate is drawn from its exact
    distribution CN(h_bar, q); the SINR conditions on the draw, with the
    residual estimation error, transmit distortion, interferer, and noise in
    the denominator.  Returns the per-link average, shape (L,).
    """
    h_bar = np.asarray(h_bar)
    q = np.asarray(q)
    c = np.asarray(c)
    n_links, n_ant = h_bar.shape
    root_q = psd_sqrt(q)
    den_mat = p_u * c + sigma2 * np.eye(n_ant)
    if r_te is not None and p_te_u > 0.0:
        den_mat = den_mat + p_te_u * np.asarray(r_te)
    den_mat = 0.5 * (den_mat + np.conj(np.swapaxes(den_mat, -1, -2)))
    total = np.zeros(n_links)
    remaining = int(n_draws)
    chunk = max(1, min(remaining, 200000 // max(1, n_links * n_ant)))
    while remaining > 0:
        m = min(chunk, remaining)
        w = complex_normal(rng, (m, n_links, n_ant))
        g_hat = h_bar + np.einsum("lij,mlj->mli", root_q, w)
        norm2 = np.sum(np.abs(g_hat) ** 2, axis=-1)
        quad = np.einsum("mli,lij,mlj->ml", np.conj(g_hat), den_mat, g_hat).real
        num = kappa * p_u * norm2**2
        den = (1.0 - kappa) * p_u * norm2**2 + quad
        total += np.sum(np.log2(1.0 + num / den), axis=0)
        remaining -= m
    return total / float(n_draws)


def se_sc(stats: Sequence[LinkStatistics], mats: Sequence[EstimationMatrices],
          p_u: float, kappa: float, sigma2: float,
          tau_c: float, tau_p: float, tau_e: float,
          rng: np.random.Generator, n_draws: int = 10000,
          tue_stats: Sequence[TueLinkStatistics] | None = None,
          p_te_u: float = 0.0) -> tuple[float, int]:
    """SE when the single best receiver serves the uplink.

    Averages log2(1 + SINR) over estimate draws per receiver, then takes the
    best receiver.  Returns (se, serving index); ties break to lowest index.
    """
    h_bar = np.stack([s.h_bar for s in stats])
    q = np.stack([m.q for m in mats])
    c = np.stack([m.c for m in mats])
    r_te = np.stack([t.r_te for t in tue_stats]) if tue_stats is not None else None
    means = expected_log_sinr(h_bar, q, c, p_u, kappa, sigma2, rng, n_draws,
                              r_te=r_te, p_te_u=p_te_u)
    best = int(np.argmax(means))
    return prelog(tau_c, tau_p, tau_e) * float(means[best]), best


def se_cellular(stats: LinkStatistics, mats: EstimationMatrices,
                p_u: float, kappa: float, sigma2: float,
                tau_c: float, tau_p: float, tau_e: float,
                rng: np.random.Generator, n_draws: int = 10000,
                tue_stats: TueLinkStatistics | None = None,
                p_te_u: float = 0.0) -> float:
    """SE of the co-located architecture (one large array)."""
    r_te = tue_stats.r_te[None] if tue_stats is not None else None
    means = expected_log_sinr(stats.h_bar[None], mats.q[None], mats.c[None],
                              p_u, kappa, sigma2, rng, n_draws,
                              r_te=r_te, p_te_u=p_te_u)
    return prelog(tau_c, tau_p, tau_e) * float(means[0])


@dataclass(frozen=True)
class FusionVectors:
    """Per-receiver scalars feeding the second combining layer.

    b:     mean gains, (L,)
    gamma: per-receiver fluctuation scalars, (L,)
    t:     per-receiver interferer coupling scalars, (L,)
    lam:   per-receiver noise scalars (equal to b), (L,)
    """

    b: np.ndarray
    gamma: np.ndarray
    t: np.ndarray
    lam: np.ndarray


def lsfd_vectors(stats: Sequence[LinkStatistics],
                 mats: Sequence[EstimationMatrices],
                 tue_stats: Sequence[TueLinkStatistics] | None = None
                 ) -> FusionVectors:
    """Statistics the optimal fusion weights depend on."""
    h_bar = np.stack([s.h_bar for s in stats])
    r = np.stack([s.r for s in stats])
    q = np.stack([m.q for m in mats])
    ups, b = upsilon_and_b(h_bar, r, q)
    if tue_stats is not None:
        r_te = np.stack([t.r_te for t in tue_stats])
        t_vec = mixed_moment(r_te, q, h_bar)
    else:
        t_vec = np.zeros_like(b)
    return FusionVectors(b=b, gamma=ups, t=t_vec, lam=b.copy())


def lsfd_sinr_from_scalars(b, gamma, t, p_u, kappa: float, sigma2: float,
                           p_te_u: float = 0.0):
    """Optimal-fusion SINR from per-receiver scalars; the receiver axis is
    last, so leading axes broadcast as batch dimensions.

    Uses the rank-one update identity so only a diagonal solve is needed:
    with D = p_u*gamma + p_te_u*t + sigma2*b and s = sum(b^2 / D), the SINR
    is kappa*p_u*s / (1 + (1-kappa)*p_u*s).
    """
    b = np.asarray(b)
    p_u = np.asarray(p_u)
    p_u_col = p_u[..., None] if p_u.ndim else p_u
    d = p_u_col * np.asarray(gamma) + p_te_u * np.asarray(t) + sigma2 * b
    if np.any(d <= 0.0):
        raise ValueError("non-positive fusion denominator")
    s = np.sum(b**2 / d, axis=-1)
    return kappa * p_u * s / (1.0 + (1.0 - kappa) * p_u * s)


def se_lsfd(vectors: FusionVectors, p_u: float, kappa: float, sigma2: float,
            tau_c: float, tau_p: float, tau_e: float,
            p_te_u: float = 0.0) -> float:
    """SE of the distributed architecture with optimal fusion weights."""
    sinr = float(lsfd_sinr_from_scalars(vectors.b, vectors.gamma, vectors.t,
                                        float(p_u), kappa, sigma2, p_te_u))
    return prelog(tau_c, tau_p, tau_e) * np.log2(1.0 + sinr)


def se_lsfd_solve(vectors: FusionVectors, p_u: float, kappa: float,
                  sigma2: float, tau_c: float, tau_p: float, tau_e: float,
                  p_te_u: float = 0.0) -> float:
    """Same SE via the explicit matrix solve; cross-checks the scalar path."""
    b = vectors.b
    d = p_u * vectors.gamma + p_te_u * vectors.t + sigma2 * vectors.lam
    m = np.diag(d) + (1.0 - kappa) * p_u * np.outer(b, b)
    x = np.linalg.solve(m, b)
    sinr = kappa * p_u * float(b @ x)
    return prelog(tau_c, tau_p, tau_e) * np.log2(1.0 + sinr)


def complexity_count(n_ues: int, n_aps: int, n_antennas: int, tau_c: float,
                     tau_p: float, tau_e: float) -> dict[str, float]:
    """Complex multiplications per coherence block, by processing phase."""
    k, l, n = n_ues, n_aps, n_antennas
    return {
        "statistics_matrices": k * l * (4 * n**3 - n) / 3.0,
        "channel_estimates": k * l * n**2,
        "combining_vectors": k * l * n,
        "energy_beamforming": k * l * tau_e * n,
        "data_combining": k * l * (tau_c - tau_p - tau_e) * n,
    }
