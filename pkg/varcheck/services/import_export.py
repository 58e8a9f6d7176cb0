"""
Service for reading datasets and configs and writing tables and reports.
"""
import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from varcheck import constants
from varcheck.config import Config
from varcheck.exceptions import DatasetError
from varcheck.models.dataset import DatasetSpec
from varcheck.models.experiment import ExperimentConfig
from varcheck.models.fit import VarFit
from varcheck.models.report import TestReport
from varcheck.models.var import VolCurve
from varcheck.services.estimators import EstimationService
from varcheck.services.var_model import VarModelService

logger = logging.getLogger(__name__)
logger.debug("Initializing import/export service")

PathLike = Union[str, Path]


def _to_builtin(obj: Any) -> Any:
    """Recursively turn numpy containers and scalars into JSON-serializable values."""
    if isinstance(obj, dict):
        return {str(k): _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_builtin(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, Path):
        return str(obj)
    return obj


class ImportExportService:
    """Service for handling import and export operations."""

    @staticmethod
    def load_dataset(spec: DatasetSpec) -> Tuple[np.ndarray, List[str]]:
        """
        Read the selected series of a CSV file.

        Returns:
            Tuple of (T x d float array after the transform, column names)
        """
        path = Path(spec.path)
        if not path.is_file():
            raise DatasetError(f"Dataset file not found: {path}")
        try:
            df = pd.read_csv(
                path,
                sep=spec.delimiter,
                header=0 if spec.has_header else None,
                float_precision='round_trip',
            )
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            logger.error(f"Error reading dataset {path}: {str(e)}")
            raise DatasetError(f"Could not parse {path}: {e}") from e

        if spec.columns:
            try:
                if spec.has_header:
                    df = df[[str(c) for c in spec.columns]]
                else:
                    df = df.iloc[:, [int(c) for c in spec.columns]]
            except (KeyError, IndexError, ValueError) as e:
                raise DatasetError(f"Column selection {spec.columns} does not match {path}: {e}") from e
        if df.shape[1] == 0 or df.shape[0] == 0:
            raise DatasetError(f"Dataset {path} selects no data")

        numeric = df.apply(pd.to_numeric, errors='coerce')
        bad = numeric.isna() & df.notna()
        if bad.to_numpy().any():
            col = bad.any(axis=0).idxmax()
            raise DatasetError(f"Column '{col}' of {path} contains non-numeric values")
        if numeric.isna().to_numpy().any():
            row, col = np.argwhere(numeric.isna().to_numpy())[0]
            raise DatasetError(f"Missing value in {path} at row {row + 1}, column '{numeric.columns[col]}'")

        x = numeric.to_numpy(dtype=float)
        if spec.transform == "first-difference":
            if x.shape[0] < 2:
                raise DatasetError("First differences need at least two observations")
            x = np.diff(x, axis=0)
        names = [str(c) for c in numeric.columns]
        logger.info(f"Loaded dataset {path}: T={x.shape[0]}, d={x.shape[1]}, transform={spec.transform}")
        return x, names

    @staticmethod
    def _prepare(path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    @staticmethod
    def write_panel(x: np.ndarray, path: PathLike, names: Optional[List[str]] = None) -> Path:
        """Write a T x d panel as CSV at full precision."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        names = names or [f"x{k + 1}" for k in range(x.shape[1])]
        return ImportExportService.write_frame(pd.DataFrame(x, columns=names), path)

    @staticmethod
    def write_frame(frame: pd.DataFrame, path: PathLike) -> Path:
        path = ImportExportService._prepare(path)
        frame.to_csv(path, index=False, float_format=Config.FLOAT_FORMAT, lineterminator="\n")
        logger.debug(f"Wrote {len(frame)} rows to {path}")
        return path

    @staticmethod
    def write_json(payload: Dict[str, Any], path: PathLike) -> Path:
        """Write a schema-versioned JSON document."""
        path = ImportExportService._prepare(path)
        document = {"schema_version": constants.REPORT_SCHEMA_VERSION, **_to_builtin(payload)}
        path.write_text(json.dumps(document, indent=2, allow_nan=False) + "\n", encoding="utf-8")
        logger.debug(f"Wrote JSON report to {path}")
        return path

    @staticmethod
    def write_table(frame: pd.DataFrame, text: str, stem: PathLike) -> Tuple[Path, Path]:
        """CSV twin plus aligned text rendering of one table."""
        stem = Path(stem)
        csv_path = ImportExportService.write_frame(frame, stem.with_suffix(".csv"))
        txt_path = ImportExportService._prepare(stem.with_suffix(".txt"))
        txt_path.write_text(text.rstrip("\n") + "\n", encoding="utf-8")
        return csv_path, txt_path

    @staticmethod
    def fit_report(fit: VarFit, names: Optional[List[str]] = None) -> Dict[str, Any]:
        """Machine-readable summary of a fit: coefficients, standard errors, bandwidths."""
        report: Dict[str, Any] = {
            "method": fit.method,
            "d": fit.d,
            "p": fit.p,
            "nobs": fit.nobs,
            "series": names or [f"x{k + 1}" for k in range(fit.d)],
            "coefficients": fit.coeffs.to_dict()["mats"],
            "std_errors": EstimationService.standard_errors(fit).tolist() if fit.p else [],
        }
        if fit.vol_path is not None:
            report["volatility"] = fit.vol_path.to_dict()
        if fit.vol_curve is not None:
            report["volatility"] = VarModelService.vol_to_json(fit.vol_curve)
        return report

    @staticmethod
    def reports_to_json(reports: List[TestReport]) -> List[Dict[str, Any]]:
        out = []
        for r in reports:
            row = r.to_dict()
            row["rejected"] = r.rejected
            out.append(row)
        return out

    @staticmethod
    def cv_trace_frame(fit: VarFit) -> pd.DataFrame:
        """One row per bandwidth grid point with the cross-validation criterion."""
        path = fit.vol_path
        if path is None or path.cv_grid is None:
            raise DatasetError("No cross-validation trace: the fit did not select a bandwidth")
        return pd.DataFrame({"bandwidth": path.cv_grid, "cv_score": path.cv_scores})

    @staticmethod
    def _read_document(path: PathLike) -> Dict[str, Any]:
        path = Path(path)
        if not path.is_file():
            raise DatasetError(f"File not found: {path}")
        try:
            if path.suffix.lower() == ".toml":
                with path.open("rb") as f:
                    return tomllib.load(f)
            return json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
            logger.error(f"Error parsing {path}: {str(e)}")
            raise DatasetError(f"Could not parse {path}: {e}") from e

    @staticmethod
    def load_experiment_config(path: PathLike, **overrides) -> ExperimentConfig:
        """ExperimentConfig from a JSON or TOML file; keyword overrides win over file values."""
        data = ImportExportService._read_document(path)
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return ExperimentConfig.model_validate(data)
        except ValidationError as e:
            logger.error(f"Invalid experiment config {path}: {str(e)}")
            raise

    @staticmethod
    def load_vol_json(path: PathLike) -> VolCurve:
        return VarModelService.vol_from_json(ImportExportService._read_document(path))
