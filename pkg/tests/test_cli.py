import json

import numpy as np
import pytest

from trajtail.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse(out):
    return json.loads(out)


@pytest.fixture
def walk_csv(tmp_path, capsys):
    path = tmp_path / "walk.csv"
    code, _, _ = run_cli(
        capsys, "simulate", "--kind", "gaussian-walk", "--dim", "2", "--steps", "300",
        "--seed", "5", "--out", str(path),
    )
    assert code == 0
    return path


class TestExitCodes:
    def test_unknown_flag_is_argument_error(self, capsys):
        code, _, _ = run_cli(capsys, "gamma2", "--input", "x.csv", "--no-such-flag")
        assert code == 2

    def test_unknown_subcommand(self, capsys):
        code, _, _ = run_cli(capsys, "frobnicate")
        assert code == 2

    def test_missing_file_is_data_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "gamma2", "--input", str(tmp_path / "nope.csv"))
        assert code == 1

    def test_bad_value_is_argument_error(self, capsys, walk_csv):
        code, _, err = run_cli(capsys, "gamma2", "--input", str(walk_csv), "--rho", "-1")
        assert code == 2
        assert "argument error" in err

    def test_insufficient_data_is_data_error(self, capsys, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("0,0\n1,1\n2,2\n")
        code, _, err = run_cli(capsys, "tail-fit", "--input", str(path))
        assert code == 1
        assert "error" in err


class TestGamma2Command:
    def test_report_keys(self, capsys, walk_csv):
        code, out, _ = run_cli(
            capsys, "gamma2", "--input", str(walk_csv), "--rho", "0.25", "--seed", "7",
            "--iterations", "100", "--restarts", "1",
        )
        assert code == 0
        doc = parse(out)
        assert {"gamma2", "weights", "method", "n", "rho", "seed", "config"} <= set(doc)
        assert doc["n"] == 301 and doc["rho"] == 0.25 and doc["seed"] == 7
        assert len(doc["weights"]) == 301

    def test_rho_from_loss_and_lipschitz(self, capsys, walk_csv):
        code, out, _ = run_cli(
            capsys, "gamma2", "--input", str(walk_csv), "--loss-bound", "1", "--lipschitz", "4",
            "--iterations", "50", "--restarts", "1",
        )
        assert code == 0
        assert parse(out)["rho"] == 0.25


class TestConfigFile:
    def test_config_merged_under_flags(self, capsys, walk_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("rho = 0.5\niterations = 40\nrestarts = 1\n")
        code, out, _ = run_cli(capsys, "gamma2", "--input", str(walk_csv), "--config", str(cfg))
        assert code == 0
        doc = parse(out)
        assert doc["rho"] == 0.5 and doc["config"]["iterations"] == 40

    def test_explicit_flag_wins(self, capsys, walk_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("rho = 0.5\niterations = 40\nrestarts = 1\n")
        code, out, _ = run_cli(
            capsys, "gamma2", "--input", str(walk_csv), "--config", str(cfg), "--rho", "0.125"
        )
        assert code == 0
        assert parse(out)["rho"] == 0.125

    def test_unknown_key_rejected(self, capsys, walk_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("rhoo = 0.5\n")
        code, _, err = run_cli(capsys, "gamma2", "--input", str(walk_csv), "--config", str(cfg))
        assert code == 2


class TestEstimatorCommands:
    def test_tail_fit(self, capsys, walk_csv):
        code, out, _ = run_cli(capsys, "tail-fit", "--input", str(walk_csv))
        assert code == 0
        doc = parse(out)
        assert doc["alpha_density"] == pytest.approx(doc["alpha_survival"] + 1.0)

    def test_stable_index_pooled_and_layered(self, capsys, walk_csv):
        code, out, _ = run_cli(capsys, "stable-index", "--input", str(walk_csv), "--block-size", "5")
        assert code == 0
        pooled = parse(out)
        assert 0.0 < pooled["alpha_hat"] <= 2.0
        code, out, _ = run_cli(
            capsys, "stable-index", "--input", str(walk_csv), "--block-size", "5", "--layer-sizes", "1,1"
        )
        assert code == 0
        assert len(parse(out)["per_block"]) == 2

    def test_layer_sizes_must_cover(self, capsys, walk_csv):
        code, _, _ = run_cli(capsys, "stable-index", "--input", str(walk_csv), "--layer-sizes", "1")
        assert code == 2

    def test_ballmass_writes_curve(self, capsys, walk_csv, tmp_path):
        out_dir = tmp_path / "bm"
        code, out, _ = run_cli(
            capsys, "ballmass", "--input", str(walk_csv), "--lags", "1,2", "--out-dir", str(out_dir)
        )
        assert code == 0
        assert (out_dir / "ballmass.csv").exists()
        assert (out_dir / "ballmass.json").exists()

    def test_kfunction_and_cover(self, capsys, walk_csv, tmp_path):
        code, out, _ = run_cli(capsys, "kfunction", "--input", str(walk_csv), "--out-dir", str(tmp_path / "k"))
        assert code == 0 and (tmp_path / "k" / "kfunction.csv").exists()
        code, out, _ = run_cli(capsys, "cover", "--input", str(walk_csv), "--rho", "1.0")
        assert code == 0
        doc = parse(out)
        assert doc["dudley_value"] >= 0.0
        assert doc["counts"] == sorted(doc["counts"], reverse=True)


class TestBoundCommand:
    def test_theorem1_reference(self, capsys):
        code, out, _ = run_cli(
            capsys, "bound", "--form", "theorem1-prob", "--loss-bound", "1", "--lipschitz", "1",
            "--rho", "1", "--n", "100", "--delta", str(np.exp(-1.0)), "--gamma2", "0",
        )
        assert code == 0
        assert parse(out)["value"] == pytest.approx(0.1)

    def test_corollary1(self, capsys):
        code, out, _ = run_cli(capsys, "bound", "--form", "corollary1", "--alpha", "1", "--rho", "1", "--c-rho", "1")
        assert code == 0
        assert parse(out)["value"] == pytest.approx(np.sqrt(np.pi) / 2.0)

    def test_corollary1_constraint_exit_code(self, capsys):
        code, _, _ = run_cli(capsys, "bound", "--form", "corollary1", "--alpha", "1", "--rho", "1.5", "--c-rho", "1")
        assert code == 2

    def test_j_integral_and_gauss(self, capsys):
        code, out, _ = run_cli(capsys, "bound", "--form", "j-integral", "--a", "1", "--horizon", "1", "--rho", "1", "--dim", "2")
        assert code == 0 and parse(out)["value"] > 0
        code, out, _ = run_cli(capsys, "bound", "--form", "gauss-check", "--a", "1", "--r", "0.5", "--rho", "1", "--dim", "2")
        assert code == 0 and parse(out)["holds"] is True

    def test_kernel_from_curve_file(self, capsys, tmp_path):
        curve = tmp_path / "curve.csv"
        radii = np.linspace(0.1, 1.0, 10)
        lines = ["radius,mass"] + [f"{r:.17g},{1.0:.17g}" for r in radii]
        curve.write_text("\n".join(lines) + "\n")
        code, out, _ = run_cli(capsys, "bound", "--form", "kernel", "--curve", str(curve), "--rho", "1", "--dim", "2")
        assert code == 0
        assert parse(out)["value"] == pytest.approx(np.sqrt(4 * np.log(3.0)))


class TestStudyCommand:
    def test_study_files_and_overrides(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys, "study", "--name", "gaussian-dimension", "--replicates", "2", "--seed", "8",
            "--param", "steps=2000", "--param", "dims=2", "--out-dir", str(tmp_path),
        )
        assert code == 0
        doc = parse(out)
        assert (tmp_path / "gaussian_dimension.json").exists()
        assert doc["config"]["params"]["steps"] == 2000


class TestAnalyze:
    def test_bundled_report(self, capsys, walk_csv):
        code, out, _ = run_cli(
            capsys, "analyze", "--input", str(walk_csv), "--rho", "0.25",
            "--iterations", "100", "--restarts", "1",
        )
        assert code == 0
        doc = parse(out)
        for key in (
            "gamma2",
            "reciprocal_power_law",
            "ball_mass_exponent",
            "stable_index",
            "k_function_slope",
            "covering",
            "config",
        ):
            assert key in doc
        assert doc["n"] == 201  # trailing window of 200 steps
        assert doc["config"]["rho"] == 0.25

    def test_window_override(self, capsys, walk_csv):
        code, out, _ = run_cli(
            capsys, "analyze", "--input", str(walk_csv), "--window", "0",
            "--iterations", "50", "--restarts", "1",
        )
        assert code == 0
        assert parse(out)["n"] == 301


class TestDeterminism:
    def test_repeat_run_byte_identical(self, capsys, tmp_path):
        args = (
            "simulate", "--kind", "beta-prime-walk", "--dim", "2", "--steps", "120",
            "--seed", "11", "--out", str(tmp_path / "t.csv"),
        )
        _, out1, _ = run_cli(capsys, *args)
        data1 = (tmp_path / "t.csv").read_bytes()
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
        assert (tmp_path / "t.csv").read_bytes() == data1
