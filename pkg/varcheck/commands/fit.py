"""
`varcheck fit`: estimate a VAR(p) by OLS, GLS or ALS and report the coefficients.
"""
import logging
from pathlib import Path
from typing import Optional

import click

from varcheck.commands.common import (
    build_kernel_config,
    dataset_options,
    handle_errors,
    kernel_options,
    load_dataset,
    model_options,
    resolve_out_dir,
)
from varcheck.exceptions import InputError
from varcheck.services.estimators import EstimationService
from varcheck.services.import_export import ImportExportService

logger = logging.getLogger(__name__)


def fit_from_options(x, order, method, vol_path, kernel_cfg):
    """Shared by fit and diagnose."""
    vol = ImportExportService.load_vol_json(vol_path) if vol_path is not None else None
    if method.upper() == "GLS" and vol is None:
        raise InputError("GLS estimation needs --vol")
    return EstimationService.fit(x, order, method=method, vol=vol, kernel=kernel_cfg)


@click.command('fit')
@dataset_options
@model_options
@kernel_options
@click.option('--cv-trace', type=click.Path(dir_okay=False, path_type=Path), default=None,
              help='Write the cross-validation criterion over the bandwidth grid to this CSV.')
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None,
              help='Directory for fit.json and coefficients.csv.')
@handle_errors
def fit_command(dataset, delimiter, no_header, columns, first_difference, order, method, vol_path,
                kernel, bandwidth_mode, bandwidth, grid_points, c_min, c_max, nu, sweeps,
                cv_trace: Optional[Path], out_dir: Optional[Path]):
    """Fit a VAR model to the series in DATASET."""
    x, names = load_dataset(dataset, delimiter, no_header, columns, first_difference)
    kernel_cfg = build_kernel_config(kernel, bandwidth_mode, bandwidth, grid_points, c_min, c_max, nu, sweeps)
    fit = fit_from_options(x, order, method, vol_path, kernel_cfg)

    table = EstimationService.coefficient_table(fit)
    click.echo(f"{fit.method} estimation of a VAR({fit.p}) on {fit.nobs} observations of {', '.join(names)}")
    if table.empty:
        click.echo("No autoregressive coefficients (p = 0): residuals equal the data.")
    else:
        click.echo(table[["coefficient", "display"]].to_string(index=False))
    if fit.vol_path is not None:
        bw = fit.vol_path.bandwidths
        click.echo(f"Bandwidth: {bw[0, 0]:.4g} ({fit.vol_path.kernel}), CV criterion: {fit.vol_path.cv_score:.6g}")

    out = resolve_out_dir(out_dir)
    ImportExportService.write_frame(table, out / "coefficients.csv")
    json_path = ImportExportService.write_json(ImportExportService.fit_report(fit, names), out / "fit.json")
    if cv_trace is not None:
        ImportExportService.write_frame(ImportExportService.cv_trace_frame(fit), cv_trace)
        logger.info(f"Cross-validation trace written to {cv_trace}")
    click.echo(f"Report written to {json_path}")
