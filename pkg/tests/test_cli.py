"""Command-line interface: subcommands, file outputs, and exit codes."""

import csv
import os

import pytest

from wptuav.cli import main

TINY = ["--set", "L=3", "--set", "N=1", "--set", "area_side=30",
        "--set", "n_clusters=3"]


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_writes_csv_and_reports_each_quantity(self, tmp_path, capsys):
        code, out, _ = run_cli(["validate", *TINY, "--draws", "2000",
                                "--warmup", "2", "--out", str(tmp_path),
                                "--seed", "3"], capsys)
        rows = list(csv.reader(open(tmp_path / "validation.csv")))
        assert rows[0] == ["quantity", "closed_form", "sample_mean",
                           "rel_error", "pass"]
        assert len(rows) - 1 == 9
        all_passed = all(r[4] == "1" for r in rows[1:])
        assert code == (0 if all_passed else 1)
        for row in rows[1:]:
            assert f" {row[0]}:" in out
        assert os.path.exists(tmp_path / "validation_meta.json")

    def test_exit_code_one_on_failed_check(self, tmp_path, capsys):
        # 50 draws cannot hit 2%: at least one quantity must fail
        code, out, _ = run_cli(["validate", *TINY, "--draws", "50",
                                "--warmup", "1", "--out", str(tmp_path),
                                "--seed", "3"], capsys)
        assert code == 1
        assert "FAIL" in out


class TestCdf:
    def test_cdf_se_runs_and_prints_summary(self, tmp_path, capsys):
        code, out, _ = run_cli(["cdf-se", *TINY, "--realizations", "4",
                                "--seed", "2", "--warmup", "2",
                                "--mc-draws", "300", "--out",
                                str(tmp_path)], capsys)
        assert code == 0
        rows = list(csv.reader(open(tmp_path / "cdf_se.csv")))
        assert rows[0] == ["variant", "sample"]
        assert len(rows) - 1 == 3 * 4
        for variant in ("cf", "sc", "cellular"):
            assert f"cdf-se {variant}: median=" in out

    def test_cdf_he_variant_filter(self, tmp_path, capsys):
        code, out, _ = run_cli(["cdf-he", *TINY, "--realizations", "3",
                                "--seed", "2", "--warmup", "1",
                                "--variants", "cf,sc", "--out",
                                str(tmp_path)], capsys)
        assert code == 0
        rows = list(csv.reader(open(tmp_path / "cdf_he.csv")))
        assert len(rows) - 1 == 2 * 3
        assert {r[0] for r in rows[1:]} == {"cf", "sc"}
        assert "cellular" not in out


class TestRhoSweep:
    def test_grid_and_argmax_line(self, tmp_path, capsys):
        code, out, _ = run_cli(["rho-sweep", *TINY, "--realizations", "3",
                                "--seed", "4", "--warmup", "2",
                                "--rho-grid", "0,0.5,1", "--out",
                                str(tmp_path)], capsys)
        assert code == 0
        rows = list(csv.reader(open(tmp_path / "rho_sweep.csv")))
        assert rows[0] == ["variant", "rho", "median_se"]
        medians = {float(r[1]): float(r[2]) for r in rows[1:]}
        assert medians[0.0] == 0.0
        assert medians[1.0] == 0.0
        assert medians[0.5] > 0.0
        assert "rho-sweep cf: argmax rho=0.5" in out


class TestTrajectory:
    def test_small_flight_logs(self, tmp_path, capsys):
        code, out, _ = run_cli(["trajectory", "--set", "L=3", "--set", "N=1",
                                "--set", "area_side=4", "--set",
                                "n_clusters=3", "--realizations", "1",
                                "--seed", "8", "--warmup", "2",
                                "--mc-draws", "300", "--schemes", "line,ap",
                                "--out", str(tmp_path)], capsys)
        assert code == 0
        summary = list(csv.DictReader(open(tmp_path / "trajectory_summary.csv")))
        assert {r["scheme"] for r in summary} == {"line", "ap"}
        assert os.path.exists(tmp_path / "trajectory_line.csv")
        assert os.path.exists(tmp_path / "trajectory_ap.csv")
        assert "trajectory line: avg_se=" in out
        assert "trajectory ap: avg_se=" in out


class TestComplexity:
    def test_counts_file_and_stdout(self, tmp_path, capsys):
        code, out, _ = run_cli(["complexity", "--ues", "2", "--out",
                                str(tmp_path)], capsys)
        assert code == 0
        rows = list(csv.reader(open(tmp_path / "complexity.csv")))
        assert rows[0] == ["phase", "complex_multiplications"]
        assert len(rows) - 1 == 5
        assert "statistics_matrices:" in out


class TestConfigHandling:
    def test_config_file_is_loaded(self, tmp_path, capsys):
        cfg = tmp_path / "scenario.cfg"
        cfg.write_text("L = 3\nN = 1\narea_side = 30\nn_clusters = 3\n")
        code, _, _ = run_cli(["complexity", "--config", str(cfg), "--out",
                              str(tmp_path)], capsys)
        assert code == 0
        rows = list(csv.reader(open(tmp_path / "complexity.csv")))
        # statistics_matrices = K*L*(4N^3 - N)/3 = 1*3*3/3 = 3 at N=1
        assert float(rows[1][1]) == 3.0

    def test_unknown_key_exits_two(self, tmp_path, capsys):
        code, _, err = run_cli(["complexity", "--set", "bogus=1", "--out",
                                str(tmp_path)], capsys)
        assert code == 2
        assert "config error" in err

    def test_malformed_set_exits_two(self, tmp_path, capsys):
        code, _, err = run_cli(["complexity", "--set", "L", "--out",
                                str(tmp_path)], capsys)
        assert code == 2
        assert "config error" in err

    def test_bad_value_type_exits_two(self, tmp_path, capsys):
        code, _, err = run_cli(["complexity", "--set", "L=abc", "--out",
                                str(tmp_path)], capsys)
        assert code == 2
        assert "config error" in err

    def test_unknown_variant_exits_two(self, tmp_path, capsys):
        code, _, err = run_cli(["cdf-se", "--variants", "mesh", "--out",
                                str(tmp_path)], capsys)
        assert code == 2
        assert "config error" in err

    def test_missing_config_file_exits_two(self, tmp_path, capsys):
        code, _, err = run_cli(["complexity", "--config",
                                str(tmp_path / "absent.cfg")], capsys)
        assert code == 2


class TestArgparseBehavior:
    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        assert "wptuav" in capsys.readouterr().out

    def test_missing_subcommand_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
