"""Large-scale fading, Rician statistics, spatial correlation, and the
scenario realization that freezes scattering geometry per placement."""

import math

import numpy as np
import pytest

from wptuav.channel import (CLUSTER_HALF_WIDTH_RAD, ScenarioRealization,
                            complex_normal, draw_channel, link_statistics,
                            los_steering, nlos_correlation, path_loss, psd_sqrt,
                            rician_factor, scattering_correlation,
                            split_large_scale, tue_path_loss,
                            tue_path_loss_from_distance)
from wptuav.config import ScenarioConfig
from wptuav.geometry import Position, generate_placement


class TestLargeScale:
    def test_path_loss_directly_overhead(self):
        # beta0 / (0 + H^2) = 1e-4 / 400
        val = path_loss(Position(10, 10), Position(10, 10), 20.0, 1e-4)
        assert val == pytest.approx(2.5e-7)

    def test_path_loss_with_horizontal_offset(self):
        val = path_loss(Position(0, 0), Position(100, 0), 20.0, 1e-4)
        assert val == pytest.approx(1e-4 / 10400.0)

    def test_rician_factor_reference_points(self):
        assert rician_factor(100.0) == pytest.approx(10.0)
        assert rician_factor(20.0) == pytest.approx(17.378008287493753)
        assert rician_factor(430.0) == pytest.approx(1.0232929922807541)

    def test_rician_factor_decreases_with_distance(self):
        d = np.linspace(20.0, 500.0, 50)
        k = rician_factor(d)
        assert np.all(np.diff(k) < 0.0)

    def test_split_large_scale_amplitudes(self):
        los, nlos = split_large_scale(1.0, 10.0)
        assert los == pytest.approx(math.sqrt(10.0 / 11.0))
        assert nlos == pytest.approx(math.sqrt(1.0 / 11.0))
        # the two shares recombine to the full gain
        assert los**2 + nlos**2 == pytest.approx(1.0)

    def test_split_scales_linearly_with_gain(self):
        # the square-root weighting applies to K only; the large-scale gain
        # multiplies both parts linearly
        los, nlos = split_large_scale(4.0, 10.0)
        ref_los, ref_nlos = split_large_scale(1.0, 10.0)
        assert los == pytest.approx(4.0 * ref_los)
        assert nlos == pytest.approx(4.0 * ref_nlos)


class TestSteeringAndCorrelation:
    def test_half_wavelength_steering_at_30_degrees(self):
        h = los_steering(math.radians(30.0), 2, 0.5, 1.0)
        assert h[0] == pytest.approx(1.0)
        assert h[1] == pytest.approx(1j)

    def test_steering_amplitude_is_root_of_gain(self):
        h = los_steering(0.3, 4, 0.5, 2.5)
        assert np.allclose(np.abs(h), np.sqrt(2.5))

    def test_correlation_hermitian_psd_unit_diag(self):
        rng = np.random.default_rng(5)
        aoas = rng.uniform(-math.pi, math.pi, size=6)
        r = scattering_correlation(aoas, math.radians(10.0), 4, 0.7)
        assert np.array_equal(r, np.conj(r.T))
        eig = np.linalg.eigvalsh(r)
        assert np.all(eig >= -1e-12)
        assert np.allclose(np.diag(r).real, 0.7)

    def test_correlation_single_antenna_is_scalar_power(self):
        r = scattering_correlation(np.array([0.2, -0.4]), 0.17, 1, 0.9)
        assert r.shape == (1, 1)
        assert r[0, 0] == pytest.approx(0.9)

    def test_nlos_correlation_draws_clusters(self):
        rng = np.random.default_rng(2)
        r = nlos_correlation(0.3, 4, 10.0, 6, 0.5, rng)
        assert r.shape == (4, 4)
        assert np.allclose(np.diag(r).real, 0.5)

    def test_psd_sqrt_factorizes(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        r = a @ np.conj(a.T)
        root = psd_sqrt(r)
        assert np.allclose(root @ np.conj(root.T), r)


class TestGroundPathLoss:
    def test_reference_value_at_one_km(self):
        assert tue_path_loss_from_distance(1000.0) == pytest.approx(
            8.47227414140598e-15)

    def test_flat_inside_first_breakpoint(self):
        assert tue_path_loss_from_distance(5.0) == pytest.approx(
            tue_path_loss_from_distance(10.0))

    def test_continuous_at_breakpoints(self):
        for d in (10.0, 50.0):
            below = tue_path_loss_from_distance(d * (1 - 1e-9))
            above = tue_path_loss_from_distance(d * (1 + 1e-9))
            assert below == pytest.approx(above, rel=1e-6)

    def test_monotone_nonincreasing(self):
        d = np.linspace(1.0, 2000.0, 400)
        pl = tue_path_loss_from_distance(d)
        assert np.all(np.diff(pl) <= 1e-30)

    def test_position_wrapper_matches_distance_form(self):
        a, b = Position(0.0, 0.0), Position(30.0, 40.0)
        assert tue_path_loss(a, b) == pytest.approx(
            tue_path_loss_from_distance(50.0))


class TestLinkStatistics:
    def test_shapes_and_k_wiring(self):
        offs = np.zeros(6)
        s = link_statistics(Position(0, 0), Position(60, 80), 20.0, 2, 0.5,
                            10.0, 1e-4, offs)
        d3d = math.hypot(100.0, 20.0)
        assert s.k_factor == pytest.approx(float(rician_factor(d3d)))
        assert s.h_bar.shape == (2,)
        assert s.r.shape == (2, 2)
        assert np.allclose(np.abs(s.h_bar), np.sqrt(s.beta_los))
        assert np.allclose(np.diag(s.r).real, s.beta_nlos)

    def test_closer_site_has_larger_gain(self):
        offs = np.zeros(6)
        near = link_statistics(Position(0, 0), Position(10, 0), 20.0, 2, 0.5,
                               10.0, 1e-4, offs)
        far = link_statistics(Position(0, 0), Position(90, 0), 20.0, 2, 0.5,
                              10.0, 1e-4, offs)
        assert near.zeta > far.zeta
        assert near.beta_los > far.beta_los


class TestScenarioRealization:
    def test_stat_stack_shapes(self, small_config, small_realization, uav_mid):
        pos = np.array([[uav_mid.x, uav_mid.y]])
        h_bar, r = small_realization.uav_stats(pos)
        L, N = small_config.L, small_config.N
        assert h_bar.shape == (1, L, N)
        assert r.shape == (1, L, N, N)
        hb, rb = small_realization.bs_stats(pos)
        assert hb.shape == (1, 1, L * N)
        assert rb.shape == (1, 1, L * N, L * N)

    def test_deterministic_given_seed(self, small_config):
        def build():
            rng = np.random.default_rng(np.random.SeedSequence([11]))
            pl = generate_placement(small_config, rng)
            return ScenarioRealization(small_config, pl, rng)

        a, b = build(), build()
        pos = np.array([[3.0, 4.0]])
        ha, _ = a.uav_stats(pos)
        hb, _ = b.uav_stats(pos)
        assert np.array_equal(ha, hb)

    def test_interference_flag_leaves_uav_stats_bitwise_identical(self):
        pos = np.array([[12.0, 7.0]])
        stacks = []
        for flag in (False, True):
            cfg = ScenarioConfig(L=4, N=2, tue_enabled=flag)
            rng = np.random.default_rng(np.random.SeedSequence([9]))
            pl = generate_placement(cfg, rng)
            real = ScenarioRealization(cfg, pl, rng)
            stacks.append(real.uav_stats(pos))
        assert np.array_equal(stacks[0][0], stacks[1][0])
        assert np.array_equal(stacks[0][1], stacks[1][1])

    def test_interferer_stats_available_and_psd(self, small_realization,
                                                small_config):
        r_te = small_realization.tue_ap_stats()
        L, N = small_config.L, small_config.N
        assert r_te.shape == (L, N, N)
        for l in range(L):
            assert np.all(np.linalg.eigvalsh(r_te[l]) >= -1e-18)


class TestSampling:
    def test_complex_normal_unit_variance(self):
        rng = np.random.default_rng(1)
        w = complex_normal(rng, (200000,))
        assert np.mean(np.abs(w) ** 2) == pytest.approx(1.0, rel=0.02)
        assert abs(np.mean(w)) < 0.01

    def test_draw_channel_matches_statistics(self):
        offs = np.linspace(-CLUSTER_HALF_WIDTH_RAD, CLUSTER_HALF_WIDTH_RAD, 6)
        s = link_statistics(Position(0, 0), Position(30, 40), 20.0, 2, 0.5,
                            10.0, 1e-4, offs)
        rng = np.random.default_rng(3)
        g = draw_channel(s, rng, size=120000)
        mean = g.mean(axis=0)
        assert np.allclose(mean, s.h_bar, atol=6e-3 * np.abs(s.h_bar).max())
        centered = g - s.h_bar
        cov = centered.T @ centered.conj() / g.shape[0]
        assert np.allclose(cov, s.r, atol=0.03 * np.abs(np.diag(s.r)).max())
