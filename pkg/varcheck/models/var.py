"""
Pydantic models for VAR coefficients, volatility curves and simulation settings.
"""
import logging
from typing import Any, Callable, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

logger = logging.getLogger(__name__)

VolKind = Literal["constant", "piecewise-constant-break", "affine-trend", "custom-grid"]


class VarCoefficients(BaseModel):
    """Autoregressive matrices A_1..A_p of a d-dimensional VAR(p)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    d: int = Field(ge=1)
    p: int = Field(ge=0)
    mats: List[np.ndarray] = Field(default_factory=list)

    @field_validator('mats', mode='before')
    @classmethod
    def coerce_mats(cls, v: Any) -> List[np.ndarray]:
        if v is None:
            return []
        return [np.array(m, dtype=float, ndmin=2) for m in v]

    @model_validator(mode='after')
    def validate_shapes(self) -> 'VarCoefficients':
        if len(self.mats) != self.p:
            raise ValueError(f"Expected {self.p} coefficient matrices, got {len(self.mats)}")
        for i, m in enumerate(self.mats):
            if m.shape != (self.d, self.d):
                raise ValueError(f"A_{i + 1} has shape {m.shape}, expected ({self.d}, {self.d})")
        return self

    @property
    def stacked(self) -> np.ndarray:
        """The d x dp matrix (A_1 ... A_p)."""
        if self.p == 0:
            return np.zeros((self.d, 0))
        return np.hstack(self.mats)

    @property
    def theta(self) -> np.ndarray:
        """(vec(A_1)', ..., vec(A_p)')' of length p d^2."""
        return self.stacked.reshape(-1, order='F')

    @classmethod
    def from_theta(cls, theta: np.ndarray, d: int, p: int) -> 'VarCoefficients':
        theta = np.asarray(theta, dtype=float)
        if theta.size != p * d * d:
            raise ValueError(f"theta has length {theta.size}, expected {p * d * d}")
        stacked = theta.reshape((d, d * p), order='F')
        mats = [stacked[:, i * d:(i + 1) * d].copy() for i in range(p)]
        return cls(d=d, p=p, mats=mats)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "p": self.p, "mats": [m.tolist() for m in self.mats]}


class VolCurve(BaseModel):
    """
    Deterministic covariance path r -> Sigma(r) on (0, 1].

    Built-in kinds share the form Sigma(r) = S(r)^{1/2} C S(r)^{1/2} where S(r) is
    the diagonal of component variance levels and C a fixed symmetric coupling:

      constant                  params: matrix
      piecewise-constant-break  params: pre, post, tau (one per component), coupling
      affine-trend              params: intercept, slope (one per component), coupling
      custom-grid               params: grid (left endpoints, first = 0), matrices

    A custom grid is right-continuous: Sigma(r) = matrices[k] for grid[k] <= r < grid[k+1].
    """
    d: int = Field(ge=1)
    kind: VolKind
    params: Dict[str, Any]

    def _levels(self, r: np.ndarray) -> np.ndarray:
        if self.kind == "piecewise-constant-break":
            pre = np.asarray(self.params["pre"], dtype=float)
            post = np.asarray(self.params["post"], dtype=float)
            tau = np.asarray(self.params["tau"], dtype=float)
            after = r[:, None] >= tau[None, :]
            return np.where(after, post[None, :], pre[None, :])
        intercept = np.asarray(self.params["intercept"], dtype=float)
        slope = np.asarray(self.params["slope"], dtype=float)
        return intercept[None, :] + slope[None, :] * r[:, None]

    def sigma_at(self, r: Any) -> np.ndarray:
        """Sigma(r) for scalar r (d x d) or array r (n x d x d)."""
        scalar = np.ndim(r) == 0
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        if self.kind == "constant":
            m = np.asarray(self.params["matrix"], dtype=float).reshape(self.d, self.d)
            out = np.broadcast_to(m, (rr.size, self.d, self.d)).copy()
        elif self.kind == "custom-grid":
            grid = np.asarray(self.params["grid"], dtype=float)
            mats = np.asarray(self.params["matrices"], dtype=float).reshape(-1, self.d, self.d)
            idx = np.clip(np.searchsorted(grid, rr, side='right') - 1, 0, len(grid) - 1)
            out = mats[idx].copy()
        else:
            levels = self._levels(rr)
            root = np.sqrt(levels)
            coupling = np.asarray(self.params["coupling"], dtype=float).reshape(self.d, self.d)
            out = root[:, :, None] * coupling[None, :, :] * root[:, None, :]
        return out[0] if scalar else out

    def path(self, T: int) -> np.ndarray:
        """Sigma_t = Sigma(t/T) for t = 1..T, shape (T, d, d)."""
        return self.sigma_at(np.arange(1, T + 1) / T)

    def breakpoints(self) -> List[float]:
        """Interior discontinuity locations, used as quadrature break points."""
        if self.kind == "piecewise-constant-break":
            pts = [float(t) for t in self.params["tau"]]
        elif self.kind == "custom-grid":
            pts = [float(t) for t in self.params["grid"]]
        else:
            pts = []
        return sorted({p for p in pts if 0.0 < p < 1.0})

    def to_json_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "d": self.d, "params": self.params}


class SimConfig(BaseModel):
    """Sample length, seed and innovation law of a simulated path."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    T: int = Field(ge=1)
    seed: int = 0
    burn_in: int = Field(default=0, ge=0)
    # Optional generator (rng, n, d) -> n x d array of martingale differences with
    # identity conditional variance; standard Gaussian draws when absent.
    innovation: Optional[Callable[[np.random.Generator, int, int], np.ndarray]] = None
