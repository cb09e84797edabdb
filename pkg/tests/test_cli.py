import csv
import json

import numpy as np
import pytest

from freqbin import cli


def run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path)])


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


class TestAnalytic:
    def test_beta_78_75(self, tmp_path, capsys):
        assert run(tmp_path, "analytic", "--beta-deg", "78.75") == 0
        assert "theta_over_pi=1.25" in capsys.readouterr().out
        summary = json.loads((tmp_path / "analytic.json").read_text())
        assert summary["theta_over_pi"] == pytest.approx(1.25, abs=1e-12)
        assert summary["bell_violation"] is True

    def test_reduced_visibility(self, tmp_path, capsys):
        assert run(tmp_path, "analytic", "--theta-over-pi", "1", "--phi-deg", "15") == 0
        assert "V=0.5" in capsys.readouterr().out
        summary = json.loads((tmp_path / "analytic.json").read_text())
        assert summary["visibility"] == pytest.approx(0.5, abs=1e-12)
        assert summary["bell_violation"] is False

    def test_curve_at_zero_delay(self, tmp_path):
        assert run(tmp_path, "analytic", "--theta-over-pi", "0") == 0
        header, data = read_csv(tmp_path / "analytic.csv")
        assert header == ["tau_ns", "g0", "g56"]
        zero = data[data[:, 0] == 0.0]
        assert len(zero) == 1
        assert zero[0, 2] / zero[0, 1] == pytest.approx(0.25, abs=1e-12)
        # both columns are written against |tau|
        np.testing.assert_allclose(data[:, 1:], data[::-1, 1:], rtol=1e-12)


class TestSimulate:
    def test_79_degrees(self, tmp_path):
        assert run(tmp_path, "simulate", "--beta-deg", "79") == 0
        rep = json.loads((tmp_path / "fit.json").read_text())
        assert abs(rep["theta_hat_over_pi"] - 1.25556) <= 3 * rep["theta_sigma"] / np.pi
        assert rep["bell_violation"] is True
        for name in ("beat", "reference"):
            header, data = read_csv(tmp_path / f"{name}.csv")
            assert header == ["tau_ns", "count"]
            assert data.shape == (1000, 2)

    def test_reduced_visibility_no_violation(self, tmp_path):
        assert run(tmp_path, "simulate", "--theta-over-pi", "1", "--phi-deg", "15") == 0
        rep = json.loads((tmp_path / "fit.json").read_text())
        assert rep["v_hat"] == pytest.approx(0.5, abs=0.03)
        assert rep["bell_violation"] is False

    def test_maximal_high_statistics_violates(self, tmp_path):
        assert run(tmp_path, "simulate", "--theta-over-pi", "0.3", "--n-coincidences", "1e6") == 0
        assert json.loads((tmp_path / "fit.json").read_text())["bell_violation"] is True

    def test_seed_changes_counts(self, tmp_path):
        run(tmp_path / "a", "simulate", "--beta-deg", "40", "--seed", "1")
        run(tmp_path / "b", "simulate", "--beta-deg", "40", "--seed", "2")
        a = (tmp_path / "a" / "beat.csv").read_bytes()
        b = (tmp_path / "b" / "beat.csv").read_bytes()
        assert a != b

    def test_degenerate_exit_code(self, tmp_path, capsys):
        assert run(tmp_path, "simulate", "--theta-over-pi", "0", "--phi-deg", "0") == cli.EXIT_DEGENERATE
        assert "degenerate" in capsys.readouterr().err

    def test_no_counts_exit_code(self, tmp_path):
        assert run(tmp_path, "simulate", "--beta-deg", "10", "--n-coincidences", "0") == cli.EXIT_DEGENERATE


class TestSweep:
    def test_default_grid(self, tmp_path, capsys):
        assert run(tmp_path, "sweep") == 0
        assert "slope=" in capsys.readouterr().out
        summary = json.loads((tmp_path / "sweep.json").read_text())
        assert summary["slope"] == pytest.approx(4, rel=0.02)
        assert summary["intercept"] == pytest.approx(-np.pi / 2, abs=0.05)
        header, data = read_csv(tmp_path / "sweep.csv")
        assert header == ["beta_deg", "theta_hat_over_pi", "theta_sigma_over_pi"]
        np.testing.assert_array_equal(data[:, 0], np.arange(0, 91, 10))

    def test_single_beta_matches_simulate(self, tmp_path):
        run(tmp_path / "sw", "sweep", "--betas", "79", "--seed", "4")
        run(tmp_path / "sim", "simulate", "--beta-deg", "79", "--seed", "4")
        _, data = read_csv(tmp_path / "sw" / "sweep.csv")
        rep = json.loads((tmp_path / "sim" / "fit.json").read_text())
        assert data[0, 1] == rep["theta_hat_over_pi"]

    def test_too_few_points(self, tmp_path):
        assert run(tmp_path, "sweep", "--betas", "10") == cli.EXIT_DEGENERATE


class TestConfig:
    def test_key_value_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# demo\nbeta_deg = 78.75\nphi-deg = 15   # reduced\nwindow_ns = -200, 200\n")
        assert run(tmp_path, "analytic", "--config", str(cfg)) == 0
        resolved = json.loads((tmp_path / "config.json").read_text())
        assert resolved["phi_deg"] == 15 and resolved["window_ns"] == [-200, 200]

    def test_round_trip_is_bitwise(self, tmp_path):
        assert run(tmp_path / "a", "simulate", "--beta-deg", "33", "--seed", "8", "--bin-ns", "0.5") == 0
        saved = tmp_path / "a" / "config.json"
        assert run(tmp_path / "b", "simulate", "--config", str(saved)) == 0
        for name in ("config.json", "beat.csv", "reference.csv", "fit.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_command_line_phase_overrides_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("theta_over_pi = 0.5\n")
        assert run(tmp_path, "analytic", "--config", str(cfg), "--beta-deg", "78.75") == 0
        resolved = json.loads((tmp_path / "config.json").read_text())
        assert resolved["theta_over_pi"] is None and resolved["beta_deg"] == 78.75

    def test_both_phases_rejected(self, tmp_path, capsys):
        code = run(tmp_path, "analytic", "--beta-deg", "10", "--theta-over-pi", "1")
        assert code == cli.EXIT_CONFIG
        assert "mutually exclusive" in capsys.readouterr().err

    def test_missing_phase(self, tmp_path):
        assert run(tmp_path, "simulate") == cli.EXIT_CONFIG

    def test_line_diagnostics(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("beta_deg = 10\nphi_deg = abc\n")
        assert run(tmp_path, "analytic", "--config", str(cfg)) == cli.EXIT_CONFIG
        assert "bad.cfg:2" in capsys.readouterr().err

    def test_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("beta_deg = 10\ncolour = blue\n")
        assert run(tmp_path, "analytic", "--config", str(cfg)) == cli.EXIT_CONFIG
        assert "unknown field" in capsys.readouterr().err

    def test_bad_json(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text('{"beta_deg": 10,\n "phi_deg": }')
        assert run(tmp_path, "analytic", "--config", str(cfg)) == cli.EXIT_CONFIG

    @pytest.mark.parametrize(
        "argv",
        [
            ["--phi-deg", "95"],
            ["--bin-ns", "0"],
            ["--window-ns", "10", "-10"],
            ["--n-coincidences", "-5"],
            ["--delta-mhz", "0"],
        ],
    )
    def test_invalid_values(self, tmp_path, argv):
        assert run(tmp_path, "analytic", "--beta-deg", "10", *argv) == cli.EXIT_CONFIG

    def test_usage_error_exits_1(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(tmp_path, "analytic", "--beta-deg", "not-a-number")
        assert exc.value.code == cli.EXIT_CONFIG
