"""
Kernel smoothing configuration and the estimated volatility path.
"""
import logging
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from varcheck.config import Config

logger = logging.getLogger(__name__)

KernelName = Literal["gaussian", "triangular", "epanechnikov"]


class KernelConfig(BaseModel):
    """Kernel, bandwidth search range and regularization for the volatility smoother."""
    kernel: KernelName = "gaussian"
    bandwidth_mode: Literal["single", "per-cell"] = "single"
    c_min: float = Field(default_factory=lambda: Config.CV_C_MIN, gt=0)
    c_max: float = Field(default_factory=lambda: Config.CV_C_MAX, gt=0)
    grid_points: int = Field(default_factory=lambda: Config.CV_GRID_POINTS, ge=2)
    # Regularization nu_T; "auto" selects T^(-3/5)
    nu: Union[float, Literal["auto"]] = 0.0
    # b_T = T^(-b_exponent)
    b_exponent: float = Field(default=1.0 / 3.0, gt=0, lt=1)
    # Fixed bandwidth, skips cross-validation when set
    bandwidth: Optional[float] = Field(default=None, gt=0)
    sweeps: int = Field(default=2, ge=1)

    @field_validator('nu')
    @classmethod
    def validate_nu(cls, v):
        if v != "auto" and v < 0:
            raise ValueError("nu must be nonnegative or 'auto'")
        return v

    @model_validator(mode='after')
    def validate_range(self) -> 'KernelConfig':
        if not self.c_min < self.c_max:
            raise ValueError(f"c_min ({self.c_min}) must be below c_max ({self.c_max})")
        return self

    def base_bandwidth(self, T: int) -> float:
        return float(T) ** (-self.b_exponent)

    def bandwidth_grid(self, T: int) -> np.ndarray:
        """Log-spaced grid over [c_min b_T, c_max b_T]."""
        b_T = self.base_bandwidth(T)
        return np.geomspace(self.c_min * b_T, self.c_max * b_T, self.grid_points)

    def nu_for(self, T: int) -> float:
        if self.nu == "auto":
            return float(T) ** (-0.6)
        return float(self.nu)


class VolPathEstimate(BaseModel):
    """Smoothed covariance path with its square roots and the selected bandwidths."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    sigma_t: np.ndarray
    h_t: np.ndarray
    # d x d matrix of cell bandwidths b_kl (constant in single mode)
    bandwidths: np.ndarray
    cv_score: float
    nu: float = 0.0
    kernel: KernelName = "gaussian"
    # Single-bandwidth criterion over the grid, when cross-validation ran
    cv_grid: Optional[np.ndarray] = None
    cv_scores: Optional[np.ndarray] = None

    @property
    def T(self) -> int:
        return int(self.sigma_t.shape[0])

    @property
    def d(self) -> int:
        return int(self.sigma_t.shape[1])

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "bandwidths": self.bandwidths.tolist(),
            "cv_score": self.cv_score,
            "nu": self.nu,
        }
