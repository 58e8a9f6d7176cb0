"""
Test configuration and fixtures for the package.
"""
import logging

import numpy as np
import pytest

from varcheck.config import Config
from varcheck.models.kernel import KernelConfig
from varcheck.models.var import SimConfig
from varcheck.services.var_model import VarModelService


@pytest.fixture(autouse=True)
def isolated_output(tmp_path, mocker):
    """Keep log files and CLI artefacts inside the test's temporary directory."""
    mocker.patch.object(Config, 'LOG_TO_FILE', False)
    mocker.patch.object(Config, 'OUTPUT_DIR', str(tmp_path / "output"))
    mocker.patch.object(Config, 'N_JOBS', 1)


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers bound to streams of a finished CliRunner invocation."""
    yield
    logger = logging.getLogger('varcheck')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger._varcheck_configured = False


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return np.random.default_rng(20240517)


@pytest.fixture
def fast_kernel():
    """Coarse bandwidth grid so that ALS fits stay quick."""
    return KernelConfig(grid_points=15)


@pytest.fixture
def var1_coeffs():
    return VarModelService.power_uncorrelated_coefficients()


@pytest.fixture
def break_vol():
    return VarModelService.vol_break_spec()


@pytest.fixture
def trend_vol():
    return VarModelService.vol_smooth_trend()


@pytest.fixture
def null_panel():
    """VAR(2) size design with homoscedastic errors, T = 300."""
    coeffs = VarModelService.dgp_coefficients()
    vol = VarModelService.vol_constant(np.eye(2))
    return VarModelService.simulate(coeffs, vol, SimConfig(T=300, seed=11))


@pytest.fixture
def break_panel(break_vol):
    """VAR(2) size design with the variance break, T = 400."""
    coeffs = VarModelService.dgp_coefficients()
    return VarModelService.simulate(coeffs, break_vol, SimConfig(T=400, seed=12))


@pytest.fixture
def sample_csv(tmp_path, null_panel):
    """The null panel written as a two-column CSV with header."""
    path = tmp_path / "series.csv"
    lines = ["y1,y2"] + [f"{a!r},{b!r}" for a, b in null_panel.tolist()]
    path.write_text("\n".join(lines) + "\n")
    return path
