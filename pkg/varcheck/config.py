import logging
import os
from pathlib import Path
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load environment variables from .env file
load_dotenv()
logger.debug("Environment variables loaded from .env file")

# Base directory
BASE_DIR = Path(__file__).resolve().parent.parent


# Library and CLI configuration
class Config:
    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
    LOG_DIR = os.getenv("LOG_DIR", os.path.join(BASE_DIR, "logs"))
    LOG_TO_FILE = os.getenv("LOG_TO_FILE", "True").lower() == "true"

    # Output location for CLI artefacts when no explicit path is given
    OUTPUT_DIR = os.getenv("OUTPUT_DIR", os.path.join(BASE_DIR, "output"))

    # Monte Carlo worker count (a performance knob only, results never depend on it)
    N_JOBS = int(os.getenv("N_JOBS", "1"))

    # Imhof integration
    IMHOF_TOLERANCE = float(os.getenv("IMHOF_TOLERANCE", "1e-8"))
    IMHOF_LIMIT = int(os.getenv("IMHOF_LIMIT", "500"))

    # Kernel bandwidth cross-validation grid: [CV_C_MIN * b_T, CV_C_MAX * b_T]
    CV_GRID_POINTS = int(os.getenv("CV_GRID_POINTS", "200"))
    CV_C_MIN = float(os.getenv("CV_C_MIN", "0.2"))
    CV_C_MAX = float(os.getenv("CV_C_MAX", "5.0"))

    # Condition-number gate for the modified (chi-square) statistics
    MODIFIED_COND_LIMIT = float(os.getenv("MODIFIED_COND_LIMIT", "1e12"))

    # Condition-number gate for Gamma(0) in the normalized BP/LB statistics
    GAMMA0_COND_LIMIT = float(os.getenv("GAMMA0_COND_LIMIT", "1e12"))

    # Machine-readable float format (17 significant digits)
    FLOAT_FORMAT = os.getenv("FLOAT_FORMAT", "%.17g")
