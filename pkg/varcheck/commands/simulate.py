"""
`varcheck simulate`: write one simulated path of the study designs to CSV.
"""
import logging
from pathlib import Path
from typing import Optional

import click

from varcheck.commands.common import handle_errors, resolve_out_dir
from varcheck.models.experiment import ExperimentConfig
from varcheck.models.var import SimConfig
from varcheck.services.import_export import ImportExportService
from varcheck.services.montecarlo import MonteCarloService
from varcheck.services.var_model import VarModelService

logger = logging.getLogger(__name__)


@click.command('simulate')
@click.option('--dgp', type=click.Choice(['var2-size', 'var2-power', 'uncorrelated-power']),
              default='var2-size', show_default=True)
@click.option('--vol', type=click.Choice(['iid', 'break', 'trend', 'scalar-trend', 'scalar-break']),
              default='iid', show_default=True)
@click.option('--vol-file', type=click.Path(dir_okay=False, path_type=Path), default=None,
              help='Volatility curve JSON; overrides --vol.')
@click.option('-a', 'a', type=float, default=None, help='Second-lag coefficient a of the VAR(2) design.')
@click.option('-T', 'T', type=click.IntRange(min=1), default=200, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--burn-in', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--out', 'out_path', type=click.Path(dir_okay=False, path_type=Path), default=None,
              help='CSV destination (default: <output dir>/simulated.csv).')
@handle_errors
def simulate_command(dgp, vol, vol_file, a, T, seed, burn_in, out_path: Optional[Path]):
    """Simulate a bivariate path from one of the study designs."""
    cfg = ExperimentConfig(dgp=dgp, vol=vol, a=a)
    coeffs = MonteCarloService.coefficients(cfg)
    curve = ImportExportService.load_vol_json(vol_file) if vol_file else MonteCarloService.volatility(cfg)
    x = VarModelService.simulate(coeffs, curve, SimConfig(T=T, seed=seed, burn_in=burn_in))
    if out_path is None:
        out_path = resolve_out_dir(None) / "simulated.csv"
    path = ImportExportService.write_panel(x, out_path)
    logger.info(f"Simulated {dgp} path with {curve.kind} volatility, T={T}, seed={seed}")
    click.echo(str(path))
