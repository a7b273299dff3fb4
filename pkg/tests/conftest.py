"""Shared fixtures: hand-checkable scalar link stacks and small scenarios.

The scalar fixtures use one link with one antenna, a zero LoS component, and
unit NLoS correlation, so every closed form collapses to arithmetic that can
be verified on paper.  The small-scenario fixtures keep L and the draw counts
low enough that the whole unit suite runs in seconds.
"""

from __future__ import annotations

import numpy as np
import pytest

from wptuav.channel import LinkStatistics, ScenarioRealization
from wptuav.config import ScenarioConfig
from wptuav.estimation import EstimationMatrices, estimation_matrices
from wptuav.geometry import Position, generate_placement


def make_stats(h_bar, r) -> LinkStatistics:
    """LinkStatistics with explicit h_bar / r; the scalar summaries are
    bookkeeping only and set to placeholders."""
    h_bar = np.asarray(h_bar, dtype=complex)
    r = np.asarray(r, dtype=complex)
    return LinkStatistics(zeta=1.0, k_factor=1.0, beta_los=1.0, beta_nlos=1.0,
                          h_bar=h_bar, r=r)


@pytest.fixture
def scalar_stats() -> LinkStatistics:
    """One antenna, no LoS, unit scattering power."""
    return make_stats([0.0], [[1.0]])


@pytest.fixture
def scalar_mats(scalar_stats) -> EstimationMatrices:
    """LMMSE matrices for the scalar link at p=1, kappa=1, sigma2=1.

    Psi = (1*1 + 0 + 1)^-1 = 1/2, Q = 1*1*(1/2)*1 = 1/2, C = 1 - 1/2 = 1/2.
    """
    return estimation_matrices(scalar_stats, pilot_power=1.0, kappa=1.0,
                               sigma2=1.0)


@pytest.fixture
def default_config() -> ScenarioConfig:
    return ScenarioConfig()


@pytest.fixture
def small_config() -> ScenarioConfig:
    """Three single-antenna APs in a small square: fast end-to-end paths."""
    return ScenarioConfig(L=3, N=1, area_side=30.0, n_clusters=3)


@pytest.fixture
def small_realization(small_config) -> ScenarioRealization:
    rng = np.random.default_rng(np.random.SeedSequence([42]))
    placement = generate_placement(small_config, rng)
    return ScenarioRealization(small_config, placement, rng)


@pytest.fixture
def uav_mid(small_config) -> Position:
    side = small_config.area_side
    return Position(0.4 * side, 0.55 * side)


def random_link_stack(rng: np.random.Generator, n_links: int = 3,
                      n_antennas: int = 2, los_scale: float = 1.0):
    """Random well-conditioned (h_bar, r) stack for property-style checks."""
    h_bar = los_scale * (rng.normal(size=(n_links, n_antennas))
                         + 1j * rng.normal(size=(n_links, n_antennas)))
    a = rng.normal(size=(n_links, n_antennas, n_antennas)) \
        + 1j * rng.normal(size=(n_links, n_antennas, n_antennas))
    r = a @ np.conj(np.swapaxes(a, -1, -2)) / n_antennas
    r = r + 1e-3 * np.eye(n_antennas)
    return h_bar, r


def stats_list_from_stack(h_bar, r):
    return [make_stats(h_bar[l], r[l]) for l in range(h_bar.shape[0])]
