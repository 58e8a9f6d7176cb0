import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from varcheck import __version__, create_cli
from varcheck.services.var_model import VarModelService


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def cli():
    return create_cli()


def test_help_lists_commands(runner, cli):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for name in ("fit", "diagnose", "simulate", "mc", "oracle"):
        assert name in result.output


def test_version(runner, cli):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_fit_order_zero(runner, cli, sample_csv, tmp_path):
    out = tmp_path / "fit"
    result = runner.invoke(cli, ["fit", str(sample_csv), "-p", "0", "--method", "ols", "--out-dir", str(out)])
    assert result.exit_code == 0, result.output
    assert "No autoregressive coefficients" in result.output
    report = json.loads((out / "fit.json").read_text())
    assert report["p"] == 0
    assert report["series"] == ["y1", "y2"]
    assert (out / "coefficients.csv").exists()


def test_fit_als_with_cv_trace(runner, cli, sample_csv, tmp_path):
    trace = tmp_path / "cv.csv"
    result = runner.invoke(cli, [
        "fit", str(sample_csv), "--grid-points", "8", "--cv-trace", str(trace), "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output
    assert "Bandwidth:" in result.output
    assert len(pd.read_csv(trace)) == 8
    coefficients = pd.read_csv(tmp_path / "coefficients.csv")
    assert len(coefficients) == 4


def test_fit_gls_with_vol_file(runner, cli, sample_csv, tmp_path):
    vol = tmp_path / "vol.json"
    vol.write_text(json.dumps(VarModelService.vol_to_json(VarModelService.vol_constant(np.eye(2)))))
    result = runner.invoke(cli, [
        "fit", str(sample_csv), "--method", "gls", "--vol", str(vol), "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output
    assert json.loads((tmp_path / "fit.json").read_text())["method"] == "GLS"


def test_missing_file_exits_with_input_code(runner, cli, tmp_path):
    result = runner.invoke(cli, ["fit", str(tmp_path / "absent.csv")])
    assert result.exit_code == 2
    assert "not found" in result.output


def test_bad_data_exits_with_input_code(runner, cli, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3,oops\n4,5\n")
    assert runner.invoke(cli, ["fit", str(path)]).exit_code == 2


def test_gls_needs_vol(runner, cli, sample_csv):
    result = runner.invoke(cli, ["fit", str(sample_csv), "--method", "gls"])
    assert result.exit_code == 2
    assert "--vol" in result.output


def test_bad_nu(runner, cli, sample_csv):
    assert runner.invoke(cli, ["fit", str(sample_csv), "--nu", "lots"]).exit_code == 2


def test_singular_design_exits_with_numerical_code(runner, cli, tmp_path, rng):
    path = tmp_path / "collinear.csv"
    column = rng.standard_normal(50)
    pd.DataFrame({"a": column, "b": column}).to_csv(path, index=False)
    result = runner.invoke(cli, ["fit", str(path), "--method", "ols", "--out-dir", str(tmp_path)])
    assert result.exit_code == 3


def test_diagnose_ols(runner, cli, sample_csv, tmp_path):
    result = runner.invoke(cli, [
        "diagnose", str(sample_csv), "--method", "ols", "--lags", "4,2", "--squared", "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output
    pvalues = pd.read_csv(tmp_path / "pvalues.csv")
    assert list(pvalues.columns) == ["test", "m=2", "m=4"]
    assert "LB-OLS" in set(pvalues["test"])
    bounds = pd.read_csv(tmp_path / "bounds_ols.csv")
    assert len(bounds) == 16
    assert (tmp_path / "statistics.csv").exists()
    assert (tmp_path / "squared_autocorrelations.csv").exists()
    document = json.loads((tmp_path / "diagnostics.json").read_text())
    assert document["schema_version"] == 1
    assert len(document["reports"]) == 12


def test_diagnose_als(runner, cli, sample_csv, tmp_path):
    result = runner.invoke(cli, [
        "diagnose", str(sample_csv), "--grid-points", "8", "--lags", "3", "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output
    assert "LB-ALS-a" in result.output
    assert (tmp_path / "bounds_ols.csv").exists()
    bounds = pd.read_csv(tmp_path / "bounds_als.csv")
    assert bounds["bound_naive"].isna().all()


def test_diagnose_bad_lags(runner, cli, sample_csv):
    assert runner.invoke(cli, ["diagnose", str(sample_csv), "--lags", "0,3"]).exit_code == 2


def test_simulate_is_deterministic(runner, cli, tmp_path):
    first, second, other = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    args = ["simulate", "--vol", "break", "-T", "120", "--seed", "5"]
    assert runner.invoke(cli, args + ["--out", str(first)]).exit_code == 0
    assert runner.invoke(cli, args + ["--out", str(second)]).exit_code == 0
    assert runner.invoke(cli, ["simulate", "--vol", "break", "-T", "120", "--seed", "6", "--out", str(other)]).exit_code == 0
    assert first.read_bytes() == second.read_bytes()
    assert first.read_bytes() != other.read_bytes()
    frame = pd.read_csv(first)
    assert frame.shape == (120, 2)


def test_simulate_default_destination(runner, cli, tmp_path):
    result = runner.invoke(cli, ["simulate", "-T", "30"])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "output" / "simulated.csv").exists()


def test_mc_size_study(runner, cli, tmp_path):
    result = runner.invoke(cli, [
        "mc", "--vol", "break", "-N", "2", "--T-list", "50", "--m-list", "3", "--n-jobs", "1",
        "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "size_break.csv")
    assert set(frame["T"]) == {50}
    assert (tmp_path / "size_break.txt").read_text().startswith(" ")


def test_mc_weight_table(runner, cli, tmp_path):
    result = runner.invoke(cli, [
        "mc", "--table", "4", "-N", "2", "--T-list", "60", "--m-list", "2", "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "table4.csv")
    assert len(frame) == 8
    assert "als_mean" in frame.columns


def test_mc_config_file(runner, cli, tmp_path):
    config = tmp_path / "study.toml"
    config.write_text('vol = "iid"\nN = 1\nT_list = [40]\nm_list = [2]\ntests = ["LB-naive", "LB-OLS"]\n')
    result = runner.invoke(cli, ["mc", "--config", str(config), "--seed", "3", "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert len(pd.read_csv(tmp_path / "size_iid.csv")) == 2


def test_mc_invalid_config(runner, cli, tmp_path):
    config = tmp_path / "study.json"
    config.write_text(json.dumps({"T_list": [3]}))
    assert runner.invoke(cli, ["mc", "--config", str(config)]).exit_code == 2


def test_oracle(runner, cli, tmp_path):
    result = runner.invoke(cli, ["oracle", "--grid", "--points", "3", "--out-dir", str(tmp_path)])
    assert result.exit_code == 0, result.output
    fixture = json.loads((tmp_path / "oracles.json").read_text())
    assert fixture["schema_version"] == 1
    assert fixture["example1"]["sigma_ols_lag2_11"] == pytest.approx(0.625)
    assert len(pd.read_csv(tmp_path / "example1_grid.csv")) == 9
