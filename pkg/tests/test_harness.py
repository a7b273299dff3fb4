"""Experiment runners: file formats, determinism, and summary statistics.

Everything here runs on deliberately tiny scenes (few links, few
realizations, few sample draws) — the point is plumbing, not physics.
"""

import csv
import json
import os

import numpy as np
import pytest

from wptuav.config import ScenarioConfig
from wptuav.geometry import generate_placement
from wptuav.harness import (DistributionSummary, ExperimentSpec,
                            MonteCarloReport, _variant_child_seed,
                            run_cdf_experiment, run_complexity,
                            run_rho_sweep, run_trajectory_experiment,
                            run_validation, write_complexity_csv,
                            write_sidecar, write_validation_csv)


@pytest.fixture(scope="module")
def tiny_config():
    return ScenarioConfig(L=3, N=1, area_side=30.0, n_clusters=3)


def cdf_spec(out_dir, kind="cdf-se", workers=1, seed=5):
    return ExperimentSpec(kind=kind, variants=("cf", "sc", "cellular"),
                          realizations=6, rng_seed=seed, out_dir=str(out_dir),
                          warmup=2, mc_draws=400, workers=workers)


class TestCdfExperiment:
    def test_se_samples_and_csv(self, tiny_config, tmp_path):
        spec = cdf_spec(tmp_path)
        summaries, samples = run_cdf_experiment(spec, tiny_config)
        assert set(samples) == {"cf", "sc", "cellular"}
        for variant in samples:
            assert samples[variant].shape == (6,)
            assert np.all(np.isfinite(samples[variant]))
            assert np.all(samples[variant] > 0.0)
            assert summaries[variant].median == pytest.approx(
                np.median(samples[variant]))
        rows = list(csv.reader(open(tmp_path / "cdf_se.csv")))
        assert rows[0] == ["variant", "sample"]
        assert len(rows) - 1 == 3 * 6
        # values in the file roundtrip exactly to the returned samples
        by_variant = {}
        for variant, value in rows[1:]:
            by_variant.setdefault(variant, []).append(float(value))
        for variant in samples:
            assert by_variant[variant] == list(samples[variant])

    def test_he_kind_writes_he_file_and_sc_dominates(self, tiny_config,
                                                     tmp_path):
        spec = cdf_spec(tmp_path, kind="cdf-he")
        _, samples = run_cdf_experiment(spec, tiny_config)
        assert os.path.exists(tmp_path / "cdf_he.csv")
        assert os.path.exists(tmp_path / "cdf_he_meta.json")
        # the single best AP at L-times the per-AP power never harvests less
        # than the sum over APs at per-AP power: L * max >= sum
        assert np.all(samples["sc"] >= samples["cf"] - 1e-18)

    def test_worker_count_does_not_change_bytes(self, tiny_config, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        run_cdf_experiment(cdf_spec(a_dir, workers=1), tiny_config)
        run_cdf_experiment(cdf_spec(b_dir, workers=3), tiny_config)
        assert (a_dir / "cdf_se.csv").read_bytes() == \
            (b_dir / "cdf_se.csv").read_bytes()

    def test_rerun_is_byte_identical(self, tiny_config, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        run_cdf_experiment(cdf_spec(a_dir), tiny_config)
        run_cdf_experiment(cdf_spec(b_dir), tiny_config)
        assert (a_dir / "cdf_se.csv").read_bytes() == \
            (b_dir / "cdf_se.csv").read_bytes()

    def test_seed_changes_samples(self, tiny_config, tmp_path):
        _, s1 = run_cdf_experiment(cdf_spec(tmp_path / "a", seed=5),
                                   tiny_config)
        _, s2 = run_cdf_experiment(cdf_spec(tmp_path / "b", seed=6),
                                   tiny_config)
        assert not np.array_equal(s1["cf"], s2["cf"])

    def test_sidecar_contents(self, tiny_config, tmp_path):
        spec = cdf_spec(tmp_path)
        run_cdf_experiment(spec, tiny_config)
        meta = json.load(open(tmp_path / "cdf_se_meta.json"))
        assert meta["config"]["L"] == 3
        assert meta["config"]["area_side"] == 30.0
        assert meta["spec"]["realizations"] == 6
        assert meta["spec"]["rng_seed"] == 5
        assert "package_version" in meta
        assert "wall_clock_utc" in meta


class TestRhoSweep:
    @pytest.fixture(scope="class")
    def sweep(self, tmp_path_factory):
        config = ScenarioConfig(L=3, N=1, area_side=30.0, n_clusters=3)
        out = tmp_path_factory.mktemp("rho")
        spec = ExperimentSpec(kind="rho-sweep", variants=("cf",),
                              realizations=4, rng_seed=3, out_dir=str(out),
                              warmup=2, mc_draws=300,
                              rho_grid=(0.0, 0.4, 1.0), workers=1)
        table = run_rho_sweep(spec, config)
        return out, table

    def test_endpoints_give_exactly_zero_se(self, sweep):
        _, table = sweep
        assert table[("cf", 0.0)].median == 0.0
        assert table[("cf", 1.0)].median == 0.0

    def test_interior_point_is_positive(self, sweep):
        _, table = sweep
        assert table[("cf", 0.4)].median > 0.0

    def test_csv_layout(self, sweep):
        out, table = sweep
        rows = list(csv.reader(open(out / "rho_sweep.csv")))
        assert rows[0] == ["variant", "rho", "median_se"]
        assert len(rows) - 1 == 3
        grid = [float(r[1]) for r in rows[1:]]
        assert grid == [0.0, 0.4, 1.0]
        assert float(rows[2][2]) == table[("cf", 0.4)].median


class TestTrajectoryExperiment:
    @pytest.fixture(scope="class")
    def run(self, tmp_path_factory):
        config = ScenarioConfig(L=3, N=1, area_side=4.0, n_clusters=3)
        out = tmp_path_factory.mktemp("traj")
        spec = ExperimentSpec(kind="trajectory", variants=("cf",),
                              realizations=2, rng_seed=11, out_dir=str(out),
                              warmup=2, mc_draws=300,
                              schemes=("line", "angle", "ap"), workers=1)
        logs = run_trajectory_experiment(spec, config)
        return config, out, logs

    def test_returns_log_per_placement_and_scheme(self, run):
        _, _, logs = run
        assert len(logs) == 2
        for per_scheme in logs:
            assert set(per_scheme) == {"line", "angle", "ap"}
            for log in per_scheme.values():
                assert log.arrived
                assert log.slots_used == len(log.per_slot_se)

    def test_summary_csv_schema_and_relations(self, run):
        config, out, logs = run
        rows = list(csv.DictReader(open(out / "trajectory_summary.csv")))
        assert list(rows[0]) == ["placement", "scheme", "avg_se",
                                 "avg_se_lsfd", "slots_used",
                                 "direction_switches", "direction_searches",
                                 "aps_reached", "arrived"]
        assert len(rows) == 2 * 3
        for row in rows:
            assert row["arrived"] == "1"
            assert float(row["avg_se"]) > 0.0
            # fused combining never does worse than equal-weight combining
            assert float(row["avg_se_lsfd"]) >= float(row["avg_se"]) - 1e-12
            if row["scheme"] == "line":
                assert row["direction_switches"] == "1"
                assert row["direction_searches"] == "1"
            if row["scheme"] == "angle":
                assert int(row["direction_searches"]) == \
                    config.M * int(row["slots_used"])
        by_scheme = {r["scheme"]: r for r in rows if r["placement"] == "0"}
        assert int(by_scheme["angle"]["slots_used"]) >= \
            int(by_scheme["line"]["slots_used"])

    def test_per_slot_logs_written_for_first_placement(self, run):
        _, out, logs = run
        for scheme in ("line", "angle", "ap"):
            rows = list(csv.reader(open(out / f"trajectory_{scheme}.csv")))
            assert rows[0] == ["slot", "x", "y", "se", "p_he", "p_u"]
            assert len(rows) - 1 == logs[0][scheme].slots_used

    def test_summary_matches_returned_logs(self, run):
        _, out, logs = run
        rows = list(csv.DictReader(open(out / "trajectory_summary.csv")))
        for row in rows:
            log = logs[int(row["placement"])][row["scheme"]]
            assert float(row["avg_se"]) == log.average_se()
            assert int(row["slots_used"]) == log.slots_used
            assert int(row["aps_reached"]) == log.aps_reached

    def test_positions_csv_lists_first_placement(self, run):
        config, out, _ = run
        rows = list(csv.DictReader(open(out / "trajectory_positions.csv")))
        assert list(rows[0]) == ["role", "x", "y"]
        roles = [r["role"] for r in rows]
        assert roles.count("ap") == config.L
        assert roles.count("start") == 1 and roles.count("dest") == 1
        assert roles.count("bs") == 1
        # interference disabled in this fixture -> no interferer row
        assert roles.count("tue") == 0
        rng = np.random.default_rng(np.random.SeedSequence([11, 0]))
        placement = generate_placement(config, rng)
        ap_rows = np.array([[float(r["x"]), float(r["y"])]
                            for r in rows if r["role"] == "ap"])
        np.testing.assert_array_equal(ap_rows, placement.ap_positions)
        by_role = {r["role"]: (float(r["x"]), float(r["y"])) for r in rows
                   if r["role"] != "ap"}
        assert by_role["start"] == (placement.uav_start.x,
                                    placement.uav_start.y)
        assert by_role["dest"] == (placement.uav_dest.x, placement.uav_dest.y)

    def test_positions_csv_includes_interferer_when_enabled(self, tmp_path):
        config = ScenarioConfig(L=2, N=1, area_side=4.0, n_clusters=3,
                                tue_enabled=True)
        spec = ExperimentSpec(kind="trajectory", variants=("cf",),
                              realizations=1, rng_seed=3,
                              out_dir=str(tmp_path), warmup=1, mc_draws=200,
                              schemes=("line",), workers=1)
        run_trajectory_experiment(spec, config)
        rows = list(csv.DictReader(open(tmp_path / "trajectory_positions.csv")))
        assert [r["role"] for r in rows].count("tue") == 1


class TestValidation:
    def test_report_names_without_interferer(self, tiny_config):
        reports = run_validation(tiny_config, draws=2000, warmup=2)
        assert [r.quantity for r in reports] == [
            "q_trace", "upsilon", "he_cf", "he_sc", "he_cellular",
            "se_ds", "se_bu", "se_hi", "se_ns"]
        for rep in reports:
            assert np.isfinite(rep.closed_form)
            assert np.isfinite(rep.sample_mean)
            assert rep.sample_count == 2000

    def test_report_names_with_interferer(self, tiny_config):
        config = tiny_config.replace(tue_enabled=True)
        reports = run_validation(config, draws=2000, warmup=2)
        assert [r.quantity for r in reports] == [
            "q_trace", "upsilon", "he_cf", "g_te_trace", "he_tue_pickup",
            "he_sc", "he_cellular", "se_ds", "se_bu", "se_hi", "se_ui",
            "se_ns"]

    def test_tolerance_parameter_sets_the_pass_band(self, tiny_config):
        wide = run_validation(tiny_config, draws=500, warmup=1,
                              tolerance=np.inf)
        assert all(r.tolerance == np.inf and r.passed for r in wide)
        tight = run_validation(tiny_config, draws=500, warmup=1,
                               tolerance=0.0)
        assert all(r.tolerance == 0.0 for r in tight)
        assert any(not r.passed for r in tight)

    def test_csv_writer(self, tiny_config, tmp_path):
        reports = run_validation(tiny_config, draws=1000, warmup=1)
        path = tmp_path / "validation.csv"
        write_validation_csv(reports, path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["quantity", "closed_form", "sample_mean",
                           "rel_error", "pass"]
        assert len(rows) - 1 == len(reports)
        for row, rep in zip(rows[1:], reports):
            assert row[0] == rep.quantity
            assert float(row[1]) == rep.closed_form
            assert row[4] in ("0", "1")


class TestReportAndSummaryTypes:
    def test_rel_error_and_verdict(self):
        rep = MonteCarloReport("x", closed_form=2.0, sample_mean=2.02,
                               sample_count=10)
        assert rep.rel_error == pytest.approx(0.01)
        assert rep.passed

    def test_tolerance_boundary(self):
        rep = MonteCarloReport("x", closed_form=1.0, sample_mean=1.05,
                               sample_count=10)
        assert not rep.passed
        loose = MonteCarloReport("x", closed_form=1.0, sample_mean=1.05,
                                 sample_count=10, tolerance=0.1)
        assert loose.passed

    def test_zero_closed_form_guard(self):
        rep = MonteCarloReport("x", closed_form=0.0, sample_mean=0.0,
                               sample_count=10)
        assert rep.rel_error == 0.0
        assert rep.passed

    def test_distribution_summary_quantiles(self):
        values = np.arange(1.0, 101.0)
        summ = DistributionSummary.from_samples(values)
        assert summ.median == pytest.approx(np.quantile(values, 0.5))
        assert summ.p95_likely == pytest.approx(np.quantile(values, 0.05))
        assert summ.mean == pytest.approx(50.5)
        assert np.all(np.diff(summ.samples) >= 0.0)

    def test_distribution_summary_rejects_empty(self):
        with pytest.raises(ValueError, match="no samples"):
            DistributionSummary.from_samples([])


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            ExperimentSpec(kind="heatmap")

    def test_unknown_variant(self):
        with pytest.raises(ValueError, match="variant"):
            ExperimentSpec(kind="cdf-se", variants=("cf", "mesh"))

    def test_unknown_scheme(self):
        with pytest.raises(ValueError, match="scheme"):
            ExperimentSpec(kind="trajectory", schemes=("line", "zigzag"))

    def test_realization_floor(self):
        with pytest.raises(ValueError, match="realizations"):
            ExperimentSpec(kind="cdf-se", realizations=0)


class TestSeeding:
    def test_variant_child_seeds_are_distinct(self):
        keys = set()
        for idx in range(4):
            for variant in ("cf", "sc", "cellular"):
                seq = _variant_child_seed(9, idx, variant)
                keys.add(tuple(seq.entropy))
        assert len(keys) == 12


class TestComplexity:
    def test_phase_names_and_positivity(self, tiny_config):
        counts = run_complexity(tiny_config, n_ues=2)
        assert list(counts) == ["statistics_matrices", "channel_estimates",
                                "combining_vectors", "energy_beamforming",
                                "data_combining"]
        assert all(v > 0 for v in counts.values())

    def test_csv_writer(self, tiny_config, tmp_path):
        counts = run_complexity(tiny_config)
        path = tmp_path / "complexity.csv"
        write_complexity_csv(counts, path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["phase", "complex_multiplications"]
        assert len(rows) - 1 == 5
        assert [r[0] for r in rows[1:]] == list(counts)


class TestSidecar:
    def test_extra_fields_merge(self, tiny_config, tmp_path):
        spec = ExperimentSpec(kind="validate", out_dir=str(tmp_path))
        path = tmp_path / "meta.json"
        write_sidecar(path, tiny_config, spec, extra={"draws": 123})
        meta = json.load(open(path))
        assert meta["draws"] == 123
        assert meta["spec"]["kind"] == "validate"
        assert meta["config"]["N"] == 1
