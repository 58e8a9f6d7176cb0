"""
Portmanteau diagnostics for VAR models with time-varying volatility.
"""
import logging

import click

from varcheck.config import Config
from varcheck.utils.logger_setup import setup_logger

__version__ = "0.1.0"


def create_cli() -> click.Group:
    """
    Create and configure the command-line application.

    Returns:
        click group with every command registered
    """
    @click.group(name="varcheck", context_settings={"help_option_names": ["-h", "--help"]})
    @click.version_option(__version__, prog_name="varcheck")
    @click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
                  default=None, help='Console log level (default from LOG_LEVEL).')
    def cli(log_level):
        """Fit VAR models, test residual autocorrelation and run the simulation studies."""
        logger = setup_logger('varcheck', level=log_level)
        logger.debug(f"Configuration: output dir {Config.OUTPUT_DIR}, {Config.N_JOBS} worker(s)")

    # Register commands
    from varcheck.commands import (
        diagnose_command,
        fit_command,
        mc_command,
        oracle_command,
        simulate_command,
    )

    cli.add_command(fit_command)
    cli.add_command(diagnose_command)
    cli.add_command(simulate_command)
    cli.add_command(mc_command)
    cli.add_command(oracle_command)

    logging.getLogger(__name__).debug("Command-line application created")
    return cli
