"""
Residual autocovariance panels and their estimated asymptotic covariances.
"""
import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)


class AutocovPanel(BaseModel):
    """
    Stacked sample autocovariances gamma = vec(Gamma(1) ... Gamma(m)), divisor T.

    `rho_a` is normalized by the per-series standard deviations; `rho_b` equals
    gamma and is only set for standardized (GLS/ALS) residuals.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int = Field(ge=1)
    d: int = Field(ge=1)
    T: int = Field(ge=2)
    gamma: np.ndarray
    gamma0: np.ndarray
    rho_a: np.ndarray
    rho_b: Optional[np.ndarray] = None
    method: Literal["OLS", "GLS", "ALS"] = "OLS"

    def gamma_lag(self, h: int) -> np.ndarray:
        """Gamma(h) as a d x d matrix, 1 <= h <= m."""
        d2 = self.d * self.d
        block = self.gamma[(h - 1) * d2:h * d2]
        return block.reshape((self.d, self.d), order='F')

    def index_of(self, lag: int, i: int, j: int) -> int:
        """Flat position of entry (i, j) of Gamma(lag) in gamma (all 1-based inputs)."""
        return (lag - 1) * self.d * self.d + (j - 1) * self.d + (i - 1)


class DiagCovComponents(BaseModel):
    """Phi^u_m, Lambda^{u,theta}_m, Lambda^{eps,theta}_m, Lambda^{u,u}_m, K and S_u."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int
    d: int
    p: int
    phi_u_m: np.ndarray
    lambda_u_theta: np.ndarray
    lambda_eps_theta: Optional[np.ndarray] = None
    lambda_u_u: np.ndarray
    companion_hat: Optional[np.ndarray] = None
    s_u: np.ndarray


class ResidualCovEstimate(BaseModel):
    """Assembled covariance of sqrt(T) gamma_m: Sigma^OLS and Psi^OLS, or Sigma^GLS."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int
    d: int
    method: Literal["OLS", "GLS", "ALS"]
    sigma_ols: Optional[np.ndarray] = None
    psi_ols: Optional[np.ndarray] = None
    sigma_gls: Optional[np.ndarray] = None
    notes: list = Field(default_factory=list)


class ConfidenceBounds(BaseModel):
    """Per-entry half-widths of the robust and iid-theory confidence intervals."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int
    d: int
    T: int
    level: float
    method: Literal["OLS", "GLS", "ALS"]
    estimate: np.ndarray
    robust: np.ndarray
    naive: Optional[np.ndarray] = None
