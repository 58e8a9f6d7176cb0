"""
Fitted VAR models and the sample moment matrices used by the residual asymptotics.
"""
import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from varcheck.models.kernel import VolPathEstimate
from varcheck.models.var import VarCoefficients, VolCurve

logger = logging.getLogger(__name__)

FitMethod = Literal["OLS", "GLS", "ALS"]


class VarFit(BaseModel):
    """
    Estimated VAR(p).

    `sigma_t`/`h_t` hold the covariance path used for weighting: the true path for
    GLS, the kernel estimate for ALS, and nothing for OLS.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: FitMethod
    coeffs: VarCoefficients
    residuals_u: np.ndarray
    residuals_eps: Optional[np.ndarray] = None
    vol_path: Optional[VolPathEstimate] = None
    vol_curve: Optional[VolCurve] = None
    sigma_t: Optional[np.ndarray] = None
    h_t: Optional[np.ndarray] = None
    theta_cov: np.ndarray
    nobs: int = Field(ge=1)

    @property
    def d(self) -> int:
        return self.coeffs.d

    @property
    def p(self) -> int:
        return self.coeffs.p

    @property
    def is_weighted(self) -> bool:
        return self.method in ("GLS", "ALS")


class LambdaSet(BaseModel):
    """Sample moments: Lambda_1..3, Sigma_G, Sigma_G(x)2 and the mixed G integral."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lambda1_hat: Optional[np.ndarray] = None
    lambda2_hat: np.ndarray
    lambda3_hat: np.ndarray
    sigma_G_hat: np.ndarray
    sigma_G2_hat: np.ndarray
    g_mixed_hat: Optional[np.ndarray] = None
