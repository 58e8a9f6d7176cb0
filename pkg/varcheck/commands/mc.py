"""
`varcheck mc`: Monte Carlo size, power and weight studies.
"""
import logging
from pathlib import Path
from typing import Optional

import click

from varcheck import constants
from varcheck.commands.common import handle_errors, resolve_out_dir
from varcheck.models.experiment import ExperimentConfig
from varcheck.services.import_export import ImportExportService
from varcheck.services.montecarlo import MonteCarloService

logger = logging.getLogger(__name__)

WEIGHT_TABLE = 4
WEIGHT_TABLE_T = 200
WEIGHT_TABLE_M = 5


def _int_list(value: Optional[str], hint: str):
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}", param_hint=hint)


@click.command('mc')
@click.option('--table', type=click.IntRange(1, WEIGHT_TABLE), default=None,
              help='Rerun a study table: 1-3 size (iid, break, trend), 4 weights.')
@click.option('--study', type=click.Choice(['size', 'power', 'uncorrelated', 'weights']), default='size',
              show_default=True)
@click.option('--config', 'config_path', type=click.Path(dir_okay=False, path_type=Path), default=None,
              help='ExperimentConfig as JSON or TOML.')
@click.option('--vol', type=click.Choice(['iid', 'break', 'trend', 'scalar-trend', 'scalar-break']),
              default=None)
@click.option('-N', 'N', type=click.IntRange(min=1), default=None, help='Replications.')
@click.option('--T-list', 'T_list', default=None, help='Comma-separated sample lengths.')
@click.option('--m-list', 'm_list', default=None, help='Comma-separated lag counts.')
@click.option('--seed', type=int, default=None, help='Root seed.')
@click.option('--n-jobs', type=int, default=None, help='Worker processes (results do not depend on it).')
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None)
@handle_errors
def mc_command(table, study, config_path, vol, N, T_list, m_list, seed, n_jobs, out_dir: Optional[Path]):
    """Run a simulation study and write its table as CSV and text."""
    if table is not None:
        study = "weights" if table == WEIGHT_TABLE else "size"
        vol = vol or ("trend" if table == WEIGHT_TABLE else constants.SIZE_TABLE_VOL[table])

    overrides = {
        "vol": vol,
        "N": N,
        "T_list": _int_list(T_list, '--T-list'),
        "m_list": _int_list(m_list, '--m-list'),
        "seed_root": seed,
        "n_jobs": n_jobs,
    }
    if study == "power" and config_path is None:
        overrides["T_list"] = overrides["T_list"] or list(constants.POWER_T_LIST)
        overrides["m_list"] = overrides["m_list"] or list(constants.POWER_M_LIST)
        overrides["vol"] = overrides["vol"] or "break"

    if config_path is not None:
        cfg = ImportExportService.load_experiment_config(config_path, **overrides)
    else:
        cfg = ExperimentConfig.model_validate({k: v for k, v in overrides.items() if v is not None})

    out = resolve_out_dir(out_dir)
    stem = out / (f"table{table}" if table is not None else f"{study}_{cfg.vol}")

    if study == "weights":
        T = cfg.T_list[0] if T_list or config_path else WEIGHT_TABLE_T
        m = cfg.m_list[0] if m_list or config_path else WEIGHT_TABLE_M
        summary = MonteCarloService.weight_summary(cfg, T=T, m=m)
        frame = summary.to_frame().reset_index()
        text = summary.to_text()
    else:
        if study == "power":
            result = MonteCarloService.run_power(cfg)
        elif study == "uncorrelated":
            result = MonteCarloService.run_uncorrelated_power(
                cfg, **({"vol": vol} if vol in ("scalar-trend", "scalar-break") else {})
            )
        else:
            result = MonteCarloService.run_size(cfg)
        frame = result.to_frame()
        text = result.to_text()

    click.echo(text)
    csv_path, txt_path = ImportExportService.write_table(frame, text, stem)
    click.echo(f"\nWritten {csv_path} and {txt_path}")
