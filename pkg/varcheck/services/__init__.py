import logging

logger = logging.getLogger(__name__)
logger.debug("Initializing services package")

from varcheck.services.matnum import MatrixService  # noqa: E402
from varcheck.services.var_model import VarModelService  # noqa: E402
from varcheck.services.vol_kernel import VolKernelService  # noqa: E402
from varcheck.services.estimators import EstimationService  # noqa: E402
from varcheck.services.diagnostics import DiagnosticsService  # noqa: E402
from varcheck.services.quadform import QuadFormService  # noqa: E402
from varcheck.services.portmanteau import PortmanteauService  # noqa: E402
from varcheck.services.theory_oracles import TheoryOracleService  # noqa: E402
from varcheck.services.montecarlo import MonteCarloService  # noqa: E402
from varcheck.services.import_export import ImportExportService  # noqa: E402

__all__ = [
    "DiagnosticsService",
    "EstimationService",
    "ImportExportService",
    "MatrixService",
    "MonteCarloService",
    "PortmanteauService",
    "QuadFormService",
    "TheoryOracleService",
    "VarModelService",
    "VolKernelService",
]
