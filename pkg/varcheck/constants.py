# varcheck/constants.py

"""
Constants of the simulation design and the default test grids.
"""

from typing import Dict, List

# VAR(2) design used in the size and power studies:
# A01 fixed, A02 = a * I2 with a = 0 (size) or a = -0.3 (power)
DGP_A1: List[List[float]] = [
    [0.3, -0.3],
    [0.0, -0.1],
]
DGP_A2_SIZE = 0.0
DGP_A2_POWER = -0.3

# VAR(1) alternative used for the uncorrelatedness power design
UNCORRELATED_POWER_A1 = -0.3

# Trending volatility (smooth design)
TREND_PI1 = 250.0
TREND_PI2 = 5.0

# Common cross term of both bivariate designs
VARPI = 0.2

# Abrupt break design: f1(r) = 54 * 1{r >= 1/2}, f2(r) = 3 * 1{r >= 1/2}
BREAK_BASE = (6.0, 0.5)
BREAK_JUMP = (54.0, 3.0)
BREAK_DATE = 0.5
# The (2,2) entry of the break design carries a factor (1 + rho^2); rho is not
# pinned down by the design description, so it defaults to zero.
BREAK_RHO = 0.0

# Scalar designs for the uncorrelatedness power study
SCALAR_TREND_PI1 = 150.0
SCALAR_BREAK_JUMP = 10.0

# Replication grids
SIZE_T_LIST = [50, 100, 200]
SIZE_M_LIST = [5, 15]
POWER_T_LIST = [50, 100, 200, 300]
POWER_M_LIST = [10]
UNCORRELATED_T_LIST = [50, 100, 200]
N_REPLICATIONS = 1000
NOMINAL_LEVEL = 0.05

# Tables of the simulation study: volatility design per size table
SIZE_TABLE_VOL: Dict[int, str] = {
    1: "iid",
    2: "break",
    3: "trend",
}

# Statistic identifiers used in reports and tables
NAIVE_LB = "LB-naive"
NAIVE_BP = "BP-naive"
LB_OLS = "LB-OLS"
BP_OLS = "BP-OLS"
LB_ALS_A = "LB-ALS-a"
LB_ALS_B = "LB-ALS-b"
BP_ALS_A = "BP-ALS-a"
BP_ALS_B = "BP-ALS-b"
LB_GLS_A = "LB-GLS-a"
LB_GLS_B = "LB-GLS-b"
BP_GLS_A = "BP-GLS-a"
BP_GLS_B = "BP-GLS-b"
MOD_OLS = "LB~OLS"
MOD_ALS = "LB~ALS"
MOD_GLS = "LB~GLS"
MOD_BP_OLS = "BP~OLS"
MOD_BP_ALS = "BP~ALS"
MOD_BP_GLS = "BP~GLS"

# Rows shown in rejection tables, in display order
DEFAULT_TABLE_TESTS = [NAIVE_LB, LB_OLS, LB_ALS_A, LB_GLS_A, MOD_OLS, MOD_ALS, MOD_GLS]

# JSON schema version of machine-readable reports
REPORT_SCHEMA_VERSION = 1
