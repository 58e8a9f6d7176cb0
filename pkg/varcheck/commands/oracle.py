"""
`varcheck oracle`: closed-form reference values and the figure grids of the two-regime example.
"""
import logging
from pathlib import Path
from typing import Optional

import click
import numpy as np

from varcheck.commands.common import handle_errors, resolve_out_dir
from varcheck.services.import_export import ImportExportService
from varcheck.services.theory_oracles import TheoryOracleService

logger = logging.getLogger(__name__)


@click.command('oracle')
@click.option('--grid', is_flag=True, help='Also write Sigma^GLS(2,2) and the OLS variance ratio over (tau, s21).')
@click.option('--points', type=click.IntRange(min=2), default=50, show_default=True)
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None)
@handle_errors
def oracle_command(grid, points, out_dir: Optional[Path]):
    """Write the analytic oracle fixture as JSON."""
    out = resolve_out_dir(out_dir)
    fixture = TheoryOracleService.oracle_fixture()
    path = ImportExportService.write_json(fixture, out / "oracles.json")
    click.echo(str(path))
    if grid:
        taus = np.linspace(0.02, 0.98, points)
        levels = np.geomspace(0.05, 20.0, points)
        frame = TheoryOracleService.example1_figure_grid(taus, levels)
        click.echo(str(ImportExportService.write_frame(frame, out / "example1_grid.csv")))
