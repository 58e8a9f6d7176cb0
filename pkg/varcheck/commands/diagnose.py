"""
`varcheck diagnose`: portmanteau tests and autocorrelation bounds for a fitted VAR.
"""
import logging
from pathlib import Path
from typing import Optional

import click

from varcheck import constants
from varcheck.commands.common import (
    build_kernel_config,
    dataset_options,
    handle_errors,
    kernel_options,
    load_dataset,
    model_options,
    resolve_out_dir,
)
from varcheck.commands.fit import fit_from_options
from varcheck.models.fit import VarFit
from varcheck.services.diagnostics import DiagnosticsService
from varcheck.services.estimators import EstimationService
from varcheck.services.import_export import ImportExportService
from varcheck.services.portmanteau import PortmanteauService

logger = logging.getLogger(__name__)


def _parse_lags(value: str):
    try:
        lags = sorted({int(v) for v in value.split(",") if v.strip()})
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}", param_hint='--lags')
    if not lags or lags[0] < 1:
        raise click.BadParameter("lags must be positive", param_hint='--lags')
    return lags


def bounds_frame(fit: VarFit, x, m: int, level: float):
    """Per-lag autocorrelations with robust bounds (and iid bounds for OLS residuals)."""
    lambdas = EstimationService.lambda_set(fit, x)
    panel = DiagnosticsService.panel_for_fit(fit, m)
    comps = DiagnosticsService.diag_components(fit, lambdas, m)
    cov = DiagnosticsService.residual_cov(fit, comps, lambdas, m, range_tol=None)
    naive = None
    if not fit.is_weighted:
        naive = DiagnosticsService.naive_cov(fit.residuals_u, x, fit.p, m)
    bounds = DiagnosticsService.confidence_bounds(panel, cov, level=level, naive=naive)
    return DiagnosticsService.bounds_table(bounds)


@click.command('diagnose')
@dataset_options
@model_options
@kernel_options
@click.option('--lags', default='5,10,15', show_default=True, help='Comma-separated numbers of lags m.')
@click.option('--level', type=click.FloatRange(0, 1, min_open=True, max_open=True),
              default=constants.NOMINAL_LEVEL, show_default=True, help='Nominal test level.')
@click.option('--bounds-level', type=click.FloatRange(0, 1, min_open=True, max_open=True),
              default=0.95, show_default=True, help='Coverage of the autocorrelation bounds.')
@click.option('--squared', is_flag=True, help='Add autocorrelations of the squared residuals.')
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None)
@handle_errors
def diagnose_command(dataset, delimiter, no_header, columns, first_difference, order, method, vol_path,
                     kernel, bandwidth_mode, bandwidth, grid_points, c_min, c_max, nu, sweeps,
                     lags, level, bounds_level, squared, out_dir: Optional[Path]):
    """Test the residual autocorrelations of a VAR fitted to DATASET."""
    m_list = _parse_lags(lags)
    x, names = load_dataset(dataset, delimiter, no_header, columns, first_difference)
    kernel_cfg = build_kernel_config(kernel, bandwidth_mode, bandwidth, grid_points, c_min, c_max, nu, sweeps)
    fit = fit_from_options(x, order, method, vol_path, kernel_cfg)
    ols_fit = fit if fit.method == "OLS" else EstimationService.fit_ols(x, fit.p)

    reports = PortmanteauService.run_lags(fit, x, m_list, level)
    pvalues = PortmanteauService.reports_frame(reports, "p_value")
    statistics = PortmanteauService.reports_frame(reports, "statistic")
    click.echo(f"p-values in % ({fit.method} fit of a VAR({fit.p}), n.a.: not available)")
    click.echo(pvalues.to_string())
    click.echo("")
    click.echo("Statistics")
    click.echo(statistics.to_string())

    out = resolve_out_dir(out_dir)
    ImportExportService.write_frame(pvalues.rename_axis("test").reset_index(), out / "pvalues.csv")
    ImportExportService.write_frame(statistics.rename_axis("test").reset_index(), out / "statistics.csv")
    ImportExportService.write_json(
        {"fit": ImportExportService.fit_report(fit, names), "reports": ImportExportService.reports_to_json(reports)},
        out / "diagnostics.json",
    )

    m_max = m_list[-1]
    ImportExportService.write_frame(bounds_frame(ols_fit, x, m_max, bounds_level), out / "bounds_ols.csv")
    if fit.is_weighted:
        name = f"bounds_{fit.method.lower()}.csv"
        ImportExportService.write_frame(bounds_frame(fit, x, m_max, bounds_level), out / name)

    if squared:
        residuals = fit.residuals_eps if fit.is_weighted else fit.residuals_u
        sq = DiagnosticsService.squared_residual_autocorrelations(residuals, m_max, bounds_level)
        ImportExportService.write_frame(sq, out / "squared_autocorrelations.csv")
        outside = int((sq["autocorrelation"].abs() > sq["bound"]).sum())
        click.echo(f"\nSquared residual autocorrelations outside the {100 * bounds_level:g}% bounds: "
                   f"{outside} of {len(sq)}")

    failed = sum(1 for r in reports if not r.feasible)
    if failed:
        logger.warning(f"{failed} statistics not available")
    click.echo(f"\nTables written to {out}")
