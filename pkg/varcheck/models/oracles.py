"""
Inputs and outputs of the closed-form oracles.
"""
import logging
from typing import Literal

from pydantic import BaseModel, Field, model_validator

logger = logging.getLogger(__name__)


class TwoRegimeSpec(BaseModel):
    """Diagonal bivariate two-regime volatility: Sigma_i(r) = s_i0 before tau_i, s_i1 after."""
    s10: float = Field(default=1.0, gt=0)
    s11: float = Field(default=1.0, gt=0)
    s20: float = Field(default=1.0, gt=0)
    s21: float = Field(default=1.0, gt=0)
    tau1: float = Field(default=0.5, ge=0, le=1)
    tau2: float = Field(default=0.5, ge=0, le=1)


class PiecewiseVolIntegrals(BaseModel):
    """Integrals over (0, 1] of the component variance functions of a two-regime spec."""
    s1: float
    s2: float
    s1_sq: float
    s2_sq: float
    s1_s2: float
    sqrt_s1_over_s2: float
    sqrt_s2_over_s1: float
    s1_over_s2: float
    s2_over_s1: float

    @model_validator(mode='after')
    def check_positive(self) -> 'PiecewiseVolIntegrals':
        for name, value in self.model_dump().items():
            if value <= 0:
                raise ValueError(f"Integral {name} must be positive, got {value}")
        return self


class SlopeReport(BaseModel):
    """Approximate Bahadur slopes of three portmanteau statistics under a fixed AR(1) alternative."""
    m: int
    form_ols: float
    max_delta_ols: float
    slope_ols: float
    slope_ols_underline: float
    slope_als: float
    method: Literal["closed-form", "quadrature"] = "quadrature"

    @staticmethod
    def _ratio(a: float, b: float) -> float:
        if b == 0.0:
            return float('nan') if a == 0.0 else float('inf')
        return a / b

    @property
    def are_underline_vs_ols(self) -> float:
        return self._ratio(self.slope_ols_underline, self.slope_ols)

    @property
    def are_als_vs_ols(self) -> float:
        return self._ratio(self.slope_als, self.slope_ols)

    @property
    def are_als_vs_underline(self) -> float:
        return self._ratio(self.slope_als, self.slope_ols_underline)
