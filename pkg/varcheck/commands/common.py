"""
Shared options, error handling and output helpers for the command modules.
"""
import logging
from functools import wraps
from pathlib import Path
from typing import Optional, Tuple

import click
import numpy as np

from varcheck.config import Config
from varcheck.exceptions import NumericalError
from varcheck.models.dataset import DatasetSpec
from varcheck.models.kernel import KernelConfig
from varcheck.services.import_export import ImportExportService

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def handle_errors(f):
    """Map input problems to exit code 2 and numerical failures to exit code 3."""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except NumericalError as e:
            logger.error(f"Numerical failure in {f.__name__}: {str(e)}")
            click.echo(f"Error: {e}", err=True)
            raise click.exceptions.Exit(EXIT_NUMERICAL)
        except ValueError as e:
            # InputError, DatasetError and pydantic ValidationError included
            logger.error(f"Invalid input to {f.__name__}: {str(e)}")
            click.echo(f"Error: {e}", err=True)
            raise click.exceptions.Exit(EXIT_INPUT)
    return decorated_function


def dataset_options(f):
    f = click.option('--diff', 'first_difference', is_flag=True,
                     help='Take first differences of the selected series.')(f)
    f = click.option('--columns', default=None,
                     help='Comma-separated column names (or 0-based positions without a header).')(f)
    f = click.option('--no-header', is_flag=True, help='The file has no header row.')(f)
    f = click.option('--delimiter', default=',', show_default=True, help='Field delimiter; "tab" for TSV.')(f)
    f = click.argument('dataset', type=click.Path(dir_okay=False, path_type=Path))(f)
    return f


def kernel_options(f):
    f = click.option('--sweeps', type=int, default=2, show_default=True,
                     help='Coordinate-descent sweeps in per-cell mode.')(f)
    f = click.option('--nu', default='0', show_default=True,
                     help='Regularization of the smoothed covariance, or "auto".')(f)
    f = click.option('--c-max', type=float, default=None, help='Upper grid factor of the bandwidth search.')(f)
    f = click.option('--c-min', type=float, default=None, help='Lower grid factor of the bandwidth search.')(f)
    f = click.option('--grid-points', type=int, default=None, help='Number of bandwidths tried.')(f)
    f = click.option('--bandwidth', type=float, default=None, help='Fixed bandwidth (skips cross-validation).')(f)
    f = click.option('--bandwidth-mode', type=click.Choice(['single', 'per-cell']), default='single',
                     show_default=True)(f)
    f = click.option('--kernel', type=click.Choice(['gaussian', 'triangular', 'epanechnikov']),
                     default='gaussian', show_default=True)(f)
    return f


def model_options(f):
    f = click.option('--vol', 'vol_path', type=click.Path(dir_okay=False, path_type=Path), default=None,
                     help='Volatility curve JSON, required for GLS.')(f)
    f = click.option('--method', type=click.Choice(['ols', 'gls', 'als'], case_sensitive=False),
                     default='als', show_default=True)(f)
    f = click.option('-p', '--order', type=click.IntRange(min=0), default=1, show_default=True,
                     help='Autoregressive order.')(f)
    return f


def load_dataset(dataset: Path, delimiter: str, no_header: bool, columns: Optional[str],
                 first_difference: bool) -> Tuple[np.ndarray, list]:
    spec = DatasetSpec(
        path=dataset,
        delimiter=delimiter,
        has_header=not no_header,
        columns=columns,
        transform="first-difference" if first_difference else "none",
    )
    return ImportExportService.load_dataset(spec)


def build_kernel_config(kernel: str, bandwidth_mode: str, bandwidth: Optional[float],
                        grid_points: Optional[int], c_min: Optional[float], c_max: Optional[float],
                        nu: str, sweeps: int) -> KernelConfig:
    values = {
        "kernel": kernel,
        "bandwidth_mode": bandwidth_mode,
        "bandwidth": bandwidth,
        "sweeps": sweeps,
        "nu": nu,
    }
    if nu != "auto":
        try:
            values["nu"] = float(nu)
        except ValueError:
            raise click.BadParameter(f"nu must be a number or 'auto', got {nu!r}", param_hint='--nu')
    for key, value in (("grid_points", grid_points), ("c_min", c_min), ("c_max", c_max)):
        if value is not None:
            values[key] = value
    return KernelConfig(**values)


def resolve_out_dir(out_dir: Optional[Path]) -> Path:
    path = Path(out_dir) if out_dir is not None else Path(Config.OUTPUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path
