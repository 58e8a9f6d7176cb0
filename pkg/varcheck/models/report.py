"""
Weighted chi-square laws and portmanteau test reports.
"""
import logging
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from varcheck.config import Config

logger = logging.getLogger(__name__)

# Weights below this fraction of the largest one carry no mass
WEIGHT_FLOOR = 1e-12


class WeightedChiSq(BaseModel):
    """Law of sum_i delta_i U_i^2 with U_i iid N(0, 1)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray
    tolerance: float = Field(default_factory=lambda: Config.IMHOF_TOLERANCE, gt=0)

    @field_validator('weights', mode='before')
    @classmethod
    def sort_weights(cls, v: Any) -> np.ndarray:
        w = np.atleast_1d(np.asarray(v, dtype=float)).ravel()
        if np.any(~np.isfinite(w)):
            raise ValueError("Weights must be finite")
        if np.any(w < 0):
            raise ValueError("Weights must be nonnegative")
        return np.sort(w)[::-1].copy()

    @classmethod
    def chisq(cls, df: int) -> 'WeightedChiSq':
        return cls(weights=np.ones(int(df)))

    @property
    def effective_weights(self) -> np.ndarray:
        """Weights above the floor relative to the largest weight."""
        if not self.weights.size or self.weights[0] <= 0:
            return np.zeros(0)
        return self.weights[self.weights > WEIGHT_FLOOR * self.weights[0]]

    @property
    def mean(self) -> float:
        return float(np.sum(self.weights))

    @property
    def is_degenerate(self) -> bool:
        return self.effective_weights.size == 0


class TestReport(BaseModel):
    """One portmanteau statistic with its reference law and p-value."""
    __test__ = False
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    m: int
    statistic: Optional[float] = None
    law: Literal["weighted-chisq", "chisq", "chisq-naive"]
    weights: Optional[List[float]] = None
    df: Optional[int] = None
    p_value: Optional[float] = None
    feasible: bool = True
    notes: List[str] = Field(default_factory=list)
    level: float = Field(default=0.05, gt=0, lt=1)

    @property
    def rejected(self) -> Optional[bool]:
        """Rejection at `level`; None when the statistic is not available."""
        if not self.feasible or self.p_value is None:
            return None
        return self.p_value < self.level

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()

    def display_p(self, digits: int = 2) -> str:
        """p-value in percent, or n.a. for infeasible statistics."""
        if not self.feasible or self.p_value is None:
            return "n.a."
        return f"{100.0 * self.p_value:.{digits}f}"
