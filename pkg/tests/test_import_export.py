import json

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from varcheck.exceptions import DatasetError
from varcheck.models.dataset import DatasetSpec
from varcheck.models.report import TestReport
from varcheck.services.estimators import EstimationService
from varcheck.services.import_export import ImportExportService
from varcheck.services.var_model import VarModelService


def load(path, **kwargs):
    return ImportExportService.load_dataset(DatasetSpec(path=path, **kwargs))


def test_load_with_header(sample_csv, null_panel):
    x, names = load(sample_csv)
    assert names == ["y1", "y2"]
    np.testing.assert_array_equal(x, null_panel)


def test_load_without_header_and_positions(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("1.5,2,3\n2.5,4,6\n4.0,8,12\n")
    x, names = load(path, has_header=False, columns="0,2")
    np.testing.assert_array_equal(x, [[1.5, 3.0], [2.5, 6.0], [4.0, 12.0]])
    assert names == ["0", "2"]


def test_first_difference(tmp_path):
    path = tmp_path / "levels.csv"
    path.write_text("a,b\n1,10\n3,7\n6,7\n")
    x, _ = load(path, transform="first-difference")
    np.testing.assert_array_equal(x, [[2.0, -3.0], [3.0, 0.0]])


def test_tab_delimiter(tmp_path):
    path = tmp_path / "tabbed.tsv"
    path.write_text("a\tb\n1\t2\n3\t4\n")
    x, names = load(path, delimiter="tab", columns=["b"])
    assert names == ["b"]
    np.testing.assert_array_equal(x, [[2.0], [4.0]])


def test_delimiter_validation(tmp_path):
    with pytest.raises(ValidationError):
        DatasetSpec(path=tmp_path / "x.csv", delimiter=";;")


@pytest.mark.parametrize("content, kwargs, message", [
    ("a,b\n1,x\n2,3\n", {}, "non-numeric"),
    ("a,b\n1,\n2,3\n", {}, "Missing value"),
    ("a,b\n1,2\n", {"columns": ["c"]}, "Column selection"),
    ("a,b\n", {}, "no data"),
    ("a,b\n1,2\n", {"transform": "first-difference"}, "at least two"),
])
def test_dataset_errors(tmp_path, content, kwargs, message):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(DatasetError, match=message):
        load(path, **kwargs)


def test_missing_file(tmp_path):
    with pytest.raises(DatasetError, match="not found"):
        load(tmp_path / "absent.csv")


def test_panel_written_at_full_precision(tmp_path, rng):
    x = rng.standard_normal((20, 3))
    path = ImportExportService.write_panel(x, tmp_path / "nested" / "panel.csv")
    frame = pd.read_csv(path, float_precision="round_trip")
    assert list(frame.columns) == ["x1", "x2", "x3"]
    np.testing.assert_array_equal(frame.to_numpy(), x)


def test_write_json_adds_schema_version(tmp_path):
    path = ImportExportService.write_json({"value": np.float64(1.5), "grid": np.arange(3)}, tmp_path / "r.json")
    document = json.loads(path.read_text())
    assert document == {"schema_version": 1, "value": 1.5, "grid": [0, 1, 2]}


def test_write_json_turns_nan_into_null(tmp_path):
    path = ImportExportService.write_json({"p": float("nan")}, tmp_path / "n.json")
    assert json.loads(path.read_text())["p"] is None


def test_write_table(tmp_path):
    frame = pd.DataFrame({"test": ["LB-OLS"], "rejection_pct": [5.1]})
    csv_path, txt_path = ImportExportService.write_table(frame, "LB-OLS  5.1\n\n", tmp_path / "table1")
    assert csv_path.name == "table1.csv"
    assert txt_path.read_text() == "LB-OLS  5.1\n"


def test_fit_report(null_panel, fast_kernel):
    fit = EstimationService.fit_als(null_panel, 1, fast_kernel)
    report = ImportExportService.fit_report(fit, ["y1", "y2"])
    assert report["method"] == "ALS"
    assert report["series"] == ["y1", "y2"]
    assert len(report["std_errors"]) == 4
    assert "volatility" in report

    trace = ImportExportService.cv_trace_frame(fit)
    assert list(trace.columns) == ["bandwidth", "cv_score"]
    assert len(trace) == fast_kernel.grid_points


def test_cv_trace_needs_selection(null_panel):
    with pytest.raises(DatasetError):
        ImportExportService.cv_trace_frame(EstimationService.fit_ols(null_panel, 1))


def test_reports_to_json():
    reports = [TestReport(name="LB-OLS", m=5, statistic=3.0, law="chisq", df=16, p_value=0.01)]
    rows = ImportExportService.reports_to_json(reports)
    assert rows[0]["rejected"] is True
    assert rows[0]["df"] == 16


def test_experiment_config_json(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"vol": "break", "N": 20, "T_list": [100]}))
    cfg = ImportExportService.load_experiment_config(path, N=5, seed_root=None)
    assert cfg.vol == "break"
    assert cfg.N == 5
    assert cfg.T_list == [100]
    assert cfg.seed_root == 0


def test_experiment_config_toml(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text('dgp = "var2-power"\nvol = "trend"\nm_list = [10]\n\n[kernel]\ngrid_points = 20\n')
    cfg = ImportExportService.load_experiment_config(path)
    assert cfg.dgp == "var2-power"
    assert cfg.kernel.grid_points == 20


def test_invalid_experiment_config(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"vol": "sideways"}))
    with pytest.raises(ValidationError):
        ImportExportService.load_experiment_config(path)
    path.write_text("{not json")
    with pytest.raises(DatasetError):
        ImportExportService.load_experiment_config(path)


def test_vol_json(tmp_path):
    path = tmp_path / "vol.json"
    curve = VarModelService.vol_break_spec()
    path.write_text(json.dumps(VarModelService.vol_to_json(curve)))
    loaded = ImportExportService.load_vol_json(path)
    np.testing.assert_allclose(loaded.sigma_at(0.75), curve.sigma_at(0.75))
