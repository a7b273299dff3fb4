"""Linear MMSE channel estimation with distorted pilot transmission.

The pilot observation at a receiver is z = (sqrt(kappa*p) + eta) * g + n where
g is the true channel, eta ~ CN(0, (1-kappa)*p) is the transmit distortion of
the pilot symbol (it multiplies the full channel vector), and n ~ CN(0, s2*I).
The LMMSE estimate and its second-order statistics follow in closed form from
the channel mean h_bar and covariance R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LinkStatistics, TueLinkStatistics, complex_normal
from .linalgutil import hermitian_solve, hermitize


@dataclass(frozen=True)
class EstimationMatrices:
    """Closed-form second-order statistics of one link's LMMSE estimate.

    psi: inverse of the pilot observation covariance, (N, N)
    q:   covariance of the estimate about its mean h_bar, (N, N)
    c:   covariance of the estimation error, R - q, (N, N)
    """

    psi: np.ndarray
    q: np.ndarray
    c: np.ndarray


def pilot_observation_covariance(h_bar: np.ndarray, r: np.ndarray, pilot_power,
                                 kappa: float, sigma2: float) -> np.ndarray:
    """Covariance of the pilot observation z, batched over leading axes."""
    h_bar = np.asarray(h_bar)
    r = np.asarray(r)
    p = np.asarray(pilot_power)[..., None, None]
    outer = h_bar[..., :, None] * np.conj(h_bar[..., None, :])
    eye = np.eye(r.shape[-1])
    return p * r + (1.0 - kappa) * p * outer + sigma2 * eye


def q_matrix(h_bar: np.ndarray, r: np.ndarray, pilot_power, kappa: float,
             sigma2: float) -> np.ndarray:
    """Estimate covariance kappa*p * R Psi R, batched over leading axes.

    Hermitized exactly so downstream quadratic forms carry no spurious
    imaginary part beyond roundoff.
    """
    a = pilot_observation_covariance(h_bar, r, pilot_power, kappa, sigma2)
    x = hermitian_solve(a, np.asarray(r))
    p = np.asarray(pilot_power)[..., None, None]
    q = kappa * p * (np.asarray(r) @ x)
    return hermitize(q)


def estimation_matrices(stats: LinkStatistics, pilot_power: float, kappa: float,
                        sigma2: float) -> EstimationMatrices:
    """All closed-form estimation matrices for a single link."""
    a = pilot_observation_covariance(stats.h_bar, stats.r, pilot_power, kappa, sigma2)
    n = a.shape[-1]
    psi = hermitian_solve(a, np.eye(n, dtype=complex))
    q = hermitize(kappa * pilot_power * (stats.r @ psi @ stats.r))
    c = stats.r - q
    return EstimationMatrices(psi=psi, q=q, c=c)


def simulate_pilot(true_g: np.ndarray, pilot_power: float, kappa: float,
                   sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Draw pilot observations z for channel realizations true_g (..., N)."""
    true_g = np.asarray(true_g)
    lead = true_g.shape[:-1]
    eta = np.sqrt((1.0 - kappa) * pilot_power) * complex_normal(rng, lead)
    noise = np.sqrt(sigma2) * complex_normal(rng, true_g.shape)
    gain = np.sqrt(kappa * pilot_power) + eta
    return gain[..., None] * true_g + noise


def lmmse_estimate(stats: LinkStatistics, mats: EstimationMatrices,
                   z: np.ndarray, pilot_power: float, kappa: float) -> np.ndarray:
    """LMMSE channel estimate from pilot observations z (..., N)."""
    root = np.sqrt(kappa * pilot_power)
    gain = root * (stats.r @ mats.psi)
    innovation = np.asarray(z) - root * stats.h_bar
    return stats.h_bar + np.einsum("ij,...j->...i", gain, innovation)


def tue_estimation(r_te: np.ndarray, p_te: float, sigma2: float) -> np.ndarray:
    """Estimate covariance G = p * R (p*R + s2*I)^{-1} R for a zero-mean link.

    Accepts the interferer's (..., N, N) covariance stack; batched.
    """
    r_te = np.asarray(r_te)
    eye = np.eye(r_te.shape[-1])
    x = hermitian_solve(p_te * r_te + sigma2 * eye, r_te)
    return hermitize(p_te * (r_te @ x))


def tue_lmmse_estimate(r_te: np.ndarray, z: np.ndarray, p_te: float,
                       sigma2: float) -> np.ndarray:
    """LMMSE estimate of a zero-mean interferer channel from z (..., N)."""
    r_te = np.asarray(r_te)
    eye = np.eye(r_te.shape[-1])
    x = hermitian_solve(p_te * r_te + sigma2 * eye, np.asarray(z)[..., None])
    return np.sqrt(p_te) * np.einsum("ij,...j->...i", r_te, x[..., 0])


def tue_stats_matrices(stats: TueLinkStatistics, p_te: float,
                       sigma2: float) -> np.ndarray:
    """G matrix for one interferer link's statistics."""
    return tue_estimation(stats.r_te, p_te, sigma2)
