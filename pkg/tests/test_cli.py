"""End-to-end tests of the command-line interface (run in process)."""

import json

import numpy as np
import pytest

from gouest import __version__
from gouest.cli import build_parser, main


def _run_simulate(out, n=60, seed=3, model=("cp_exp", "0.7", "1.8", "1.8")):
    kind, a, b, mu = model
    rc = main(
        [
            "simulate",
            "--model",
            kind,
            "--a",
            a,
            "--b",
            b,
            "--mu",
            mu,
            "-n",
            str(n),
            "--seed",
            str(seed),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    return out / "sample.csv"


def _manifest(out):
    return json.loads((out / "manifest.json").read_text())


class TestSimulate:
    def test_writes_sample_and_manifest(self, tmp_path):
        out = tmp_path / "sim"
        csv = _run_simulate(out, n=60)
        lines = csv.read_text().splitlines()
        assert lines[0] == "x"
        assert len(lines) == 61
        man = _manifest(out)
        assert man["status"] == "ok"
        assert man["command"] == "simulate"
        assert man["seed"] == 3
        assert str(csv) in man["outputs"]
        assert man["finished_at"] >= man["started_at"]

    def test_deterministic_bytes(self, tmp_path):
        a = _run_simulate(tmp_path / "a", n=40, seed=9).read_bytes()
        b = _run_simulate(tmp_path / "b", n=40, seed=9).read_bytes()
        assert a == b
        c = _run_simulate(tmp_path / "c", n=40, seed=10).read_bytes()
        assert a != c

    def test_invalid_model_exits_2_with_manifest(self, tmp_path, capsys):
        out = tmp_path / "bad"
        rc = main(
            [
                "simulate",
                "--model",
                "cp_exp",
                "--a",
                "-1.0",
                "--b",
                "1.8",
                "--mu",
                "0.2",
                "-n",
                "10",
                "--out",
                str(out),
            ]
        )
        assert rc == 2
        man = _manifest(out)
        assert man["status"] == "error"
        assert man["error"]["type"] == "DomainError"
        assert "error" in capsys.readouterr().err

    def test_truncation_failure_exits_3(self, tmp_path):
        out = tmp_path / "trunc"
        rc = main(
            [
                "simulate",
                "--model",
                "trunc_norm_cp",
                "--lam",
                "1.0",
                "--alpha",
                "0.5",
                "--q",
                "0.1",
                "-n",
                "10",
                "--eta",
                "1e-12",
                "--n-max",
                "2",
                "--out",
                str(out),
            ]
        )
        assert rc == 3
        assert _manifest(out)["error"]["type"] == "TruncationError"

    def test_series_model_runs(self, tmp_path):
        out = tmp_path / "tn"
        rc = main(
            [
                "simulate",
                "--model",
                "trunc_norm_cp",
                "--lam",
                "1.0",
                "--alpha",
                "0.5",
                "--q",
                "0.1",
                "-n",
                "25",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        meta = json.loads((out / "sample.json").read_text())
        assert meta["model"]["model"] == "trunc_norm_cp"


class TestEstimate:
    def test_outputs_and_schemas(self, tmp_path):
        csv = _run_simulate(tmp_path / "sim", n=400)
        out = tmp_path / "est"
        rc = main(["estimate", str(csv), "--out", str(out)])
        assert rc == 0
        triplet = json.loads((out / "triplet.json").read_text())
        assert set(triplet) == {"mu_hat", "lambda_hat", "ill_count", "n", "config"}
        assert triplet["n"] == 400
        curve_lines = (out / "laplace_curve.csv").read_text().splitlines()
        assert curve_lines[0] == "v,re_Y,im_Y,abs_Y,denom_abs,ill_flag"
        density_lines = (out / "levy_density.csv").read_text().splitlines()
        assert density_lines[0] == "x,nu_hat,nu_bar_hat,imag_residual"
        man = _manifest(out)
        assert man["status"] == "ok"
        assert len(man["outputs"]) == 3

    def test_flags_override_config_file(self, tmp_path):
        csv = _run_simulate(tmp_path / "sim", n=50)
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"estimation": {"u0": 3.0, "vn": 4.0}}))
        out = tmp_path / "est"
        rc = main(
            [
                "estimate",
                str(csv),
                "--out",
                str(out),
                "--config",
                str(conf),
                "--u0",
                "2.5",
            ]
        )
        assert rc == 0
        section = _manifest(out)["config"]["estimation"]
        assert section["u0"] == 2.5  # flag wins
        assert section["vn"] == 4.0  # file beats default

    def test_grid_m_sets_both_grids(self, tmp_path):
        csv = _run_simulate(tmp_path / "sim", n=50)
        out = tmp_path / "est"
        rc = main(["estimate", str(csv), "--out", str(out), "--grid-m", "24"])
        assert rc == 0
        section = _manifest(out)["config"]["estimation"]
        assert section["m_fit"] == 24
        assert section["m_inv"] == 24

    def test_missing_sample_exits_2_and_writes_manifest(self, tmp_path):
        out = tmp_path / "est"
        rc = main(["estimate", str(tmp_path / "nope.csv"), "--out", str(out)])
        assert rc == 2
        man = _manifest(out)
        assert man["status"] == "error"
        assert man["error"]["type"] == "DomainError"

    def test_empty_sample_exits_2(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("x\n")
        rc = main(["estimate", str(empty), "--out", str(tmp_path / "est")])
        assert rc == 2

    def test_constant_sample_flagged_not_fatal(self, tmp_path):
        # constant observations c are the pure-drift degenerate case: the
        # estimate is exactly 1/c, and a small c puts the Mellin denominator
        # below the conditioning floor so every fit point is flagged
        const = tmp_path / "const.csv"
        const.write_text("x\n" + "0.05\n" * 64)
        out = tmp_path / "est"
        rc = main(["estimate", str(const), "--out", str(out)])
        assert rc == 0
        triplet = json.loads((out / "triplet.json").read_text())
        assert triplet["mu_hat"] == pytest.approx(20.0, rel=1e-12)
        assert triplet["lambda_hat"] == pytest.approx(0.0, abs=1e-10)
        assert triplet["ill_count"] == 50


class TestExperiments:
    def test_experiment1_outputs(self, tmp_path):
        out = tmp_path / "e1"
        rc = main(["experiment1", "-n", "400", "--reps", "2", "--out", str(out)])
        assert rc == 0
        fig1 = (out / "fig1_laplace.csv").read_text().splitlines()
        assert fig1[0] == "v,re_Y,im_Y,re_phi,im_phi,denom_abs,ill_flag"
        assert len(fig1) == 602  # 601 grid points on [-30, 30]
        first, last = fig1[1].split(","), fig1[-1].split(",")
        assert float(first[0]) == -30.0 and float(last[0]) == 30.0
        fig2 = (out / "fig2_estimates.csv").read_text().splitlines()
        assert fig2[0] == "n,replicate,vn,mu_hat,lambda_hat,ill_count"
        assert len(fig2) == 1 + 3 * 2  # ladder of three sizes, two replicates

    def test_experiment2_outputs(self, tmp_path):
        out = tmp_path / "e2"
        rc = main(["experiment2", "-n", "300", "--out", str(out)])
        assert rc == 0
        fig3 = (out / "fig3_laplace.csv").read_text().splitlines()
        assert fig3[0] == "v,re_Y,im_Y,re_phi,im_phi,denom_abs,ill_flag"
        assert len(fig3) == 502  # 501 grid points on [-5, 5]
        first, last = fig3[1].split(","), fig3[-1].split(",")
        assert float(first[0]) == -5.0 and float(last[0]) == 5.0
        fig4 = (out / "fig4_density.csv").read_text().splitlines()
        assert fig4[0] == "x,nu_hat,nu_bar_hat,imag_residual,nu_true"
        # jump density of the truncated-normal model vanishes below alpha
        row = fig4[1].split(",")
        assert float(row[0]) == 0.0
        assert float(row[4]) == 0.0

    def test_experiment2_deterministic(self, tmp_path):
        rc1 = main(["experiment2", "-n", "200", "--out", str(tmp_path / "a")])
        rc2 = main(["experiment2", "-n", "200", "--out", str(tmp_path / "b")])
        assert rc1 == rc2 == 0
        a = (tmp_path / "a" / "fig4_density.csv").read_bytes()
        b = (tmp_path / "b" / "fig4_density.csv").read_bytes()
        assert a == b


class TestRateStudyCommand:
    def test_report_written(self, tmp_path):
        out = tmp_path / "rs"
        rc = main(
            [
                "rate-study",
                "--model",
                "cp_exp",
                "--a",
                "0.7",
                "--b",
                "1.8",
                "--mu",
                "1.8",
                "--n-ladder",
                "200,400",
                "--reps",
                "2",
                "--u0",
                "29",
                "--vn",
                "30",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        payload = json.loads((out / "mise_report.json").read_text())
        assert set(payload) == {
            "n",
            "median_sq_err_mu",
            "median_sq_err_lambda",
            "median_mise",
            "slope_mu",
            "slope_mise",
        }
        assert payload["n"] == [200, 400]

    def test_bad_ladder_exits_2(self, tmp_path):
        rc = main(
            [
                "rate-study",
                "--model",
                "cp_exp",
                "--a",
                "0.7",
                "--b",
                "1.8",
                "--mu",
                "1.8",
                "--n-ladder",
                "400",
                "--out",
                str(tmp_path / "rs"),
            ]
        )
        assert rc == 2


class TestParser:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_out_is_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["experiment1"])
