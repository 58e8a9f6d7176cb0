"""
Monte Carlo experiment configuration and result tables.
"""
import logging
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from varcheck import constants
from varcheck.models.kernel import KernelConfig

logger = logging.getLogger(__name__)

DgpName = Literal["var2-size", "var2-power", "uncorrelated-power"]
VolName = Literal["iid", "break", "trend", "scalar-trend", "scalar-break"]


class ExperimentConfig(BaseModel):
    """
    One simulation study.

    DGP defaults: `var2-size` uses A_2 = 0, `var2-power` A_2 = -0.3 I_2 (both fitted by
    a VAR(1)), `uncorrelated-power` uses A_1 = -0.3 I_2 and tests residual
    uncorrelatedness of the raw series (p_fit = 0).
    """
    dgp: DgpName = "var2-size"
    vol: VolName = "iid"
    T_list: List[int] = Field(default_factory=lambda: list(constants.SIZE_T_LIST))
    m_list: List[int] = Field(default_factory=lambda: list(constants.SIZE_M_LIST))
    N: int = Field(default=constants.N_REPLICATIONS, ge=1)
    level: float = Field(default=constants.NOMINAL_LEVEL, gt=0, lt=1)
    tests: List[str] = Field(default_factory=lambda: list(constants.DEFAULT_TABLE_TESTS))
    seed_root: int = 0
    a: Optional[float] = None
    p_fit: Optional[int] = Field(default=None, ge=0)
    varpi: float = constants.VARPI
    rho: float = constants.BREAK_RHO
    burn_in: int = Field(default=0, ge=0)
    include_gls: bool = True
    kernel: KernelConfig = Field(default_factory=KernelConfig)
    n_jobs: Optional[int] = None

    @model_validator(mode='after')
    def validate_grids(self) -> 'ExperimentConfig':
        if not self.T_list or not self.m_list:
            raise ValueError("T_list and m_list must be nonempty")
        if any(t < 10 for t in self.T_list):
            raise ValueError("Sample lengths below 10 are not supported")
        if any(m < 1 for m in self.m_list):
            raise ValueError("Lags must be positive")
        return self

    @property
    def alternative_a(self) -> float:
        if self.a is not None:
            return self.a
        return constants.DGP_A2_POWER if self.dgp == "var2-power" else constants.DGP_A2_SIZE

    @property
    def fit_order(self) -> int:
        if self.p_fit is not None:
            return self.p_fit
        return 0 if self.dgp == "uncorrelated-power" else 1

    @property
    def cells(self) -> List[Tuple[int, int]]:
        return [(T, m) for T in self.T_list for m in self.m_list]


class RejectionTable(BaseModel):
    """Rejection frequencies in percent: rows are statistics, columns (T, m) cells."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    rows: List[str]
    cols: List[Tuple[int, int]]
    frequencies: np.ndarray
    failures: np.ndarray
    N: int
    level: float
    band: Tuple[float, float]

    @property
    def flags(self) -> np.ndarray:
        """True where a frequency lies outside the binomial band."""
        lo, hi = self.band
        return (self.frequencies < lo) | (self.frequencies > hi)

    def cell(self, row: str, T: int, m: int) -> float:
        return float(self.frequencies[self.rows.index(row), self.cols.index((T, m))])

    @staticmethod
    def col_label(T: int, m: int) -> str:
        return f"T={T},m={m}"

    def to_frame(self) -> pd.DataFrame:
        """Long format: one row per (test, T, m)."""
        records = []
        for i, row in enumerate(self.rows):
            for j, (T, m) in enumerate(self.cols):
                records.append({
                    "test": row,
                    "T": T,
                    "m": m,
                    "rejection_pct": float(self.frequencies[i, j]),
                    "outside_band": bool(self.flags[i, j]),
                    "failures": int(self.failures[i, j]),
                    "N": self.N,
                })
        return pd.DataFrame.from_records(records)

    def to_text(self, digits: int = 1) -> str:
        """Aligned table; frequencies outside the band are marked with '*'."""
        labels = [self.col_label(T, m) for T, m in self.cols]
        width = max([len(r) for r in self.rows] + [4])
        col_w = max([len(c) for c in labels] + [8])
        lines = [" " * width + "".join(f"  {c:>{col_w}}" for c in labels)]
        for i, row in enumerate(self.rows):
            cells = []
            for j in range(len(self.cols)):
                mark = "*" if self.flags[i, j] else " "
                cells.append(f"  {self.frequencies[i, j]:>{col_w - 1}.{digits}f}{mark}")
            lines.append(f"{row:<{width}}" + "".join(cells))
        lo, hi = self.band
        lines.append(f"N={self.N}, level={100 * self.level:g}%, band [{lo:.2f}, {hi:.2f}] (* outside)")
        return "\n".join(lines)


class WeightSummary(BaseModel):
    """Mean and standard deviation of the ascending-sorted estimated weights, per method."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    T: int
    m: int
    N: int
    means: Dict[str, np.ndarray]
    sds: Dict[str, np.ndarray]
    failures: int = 0

    def to_frame(self) -> pd.DataFrame:
        frame = {}
        for method in self.means:
            frame[f"{method}_mean"] = self.means[method]
            frame[f"{method}_sd"] = self.sds[method]
        df = pd.DataFrame(frame)
        df.index = pd.RangeIndex(1, len(df) + 1, name="index")
        return df

    def to_text(self, digits: int = 2) -> str:
        """Rows per method, cells 'mean[sd]' in the ascending-weight order."""
        lines = []
        for method in self.means:
            cells = [
                f"{mu:.{digits}f}[{sd:.{digits}f}]"
                for mu, sd in zip(self.means[method], self.sds[method])
            ]
            lines.append(f"{method:<4} " + " ".join(cells))
        return "\n".join(lines)
