"""
VAR(p) representation, stability, volatility-curve builders and simulation of
stable VAR paths with deterministic time-varying innovation covariance.
"""
import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from varcheck import constants
from varcheck.exceptions import (
    InvalidBreakDate,
    NonPositiveVariance,
    NotPositiveDefinite,
    OrderZero,
    UnstableModel,
)
from varcheck.models.var import SimConfig, VarCoefficients, VolCurve
from varcheck.services.matnum import MatrixService

logger = logging.getLogger(__name__)

STABILITY_MARGIN = 1e-10
PD_CHECK_POINTS = 1000
# Pre-sample (burn-in) regime: Sigma is frozen at its value just after r = 0
R_START = 1e-12


class VarModelService:
    """Model construction and simulation."""

    @staticmethod
    def companion_matrix(c: VarCoefficients) -> np.ndarray:
        """dp x dp companion matrix K with top block row (A_1 ... A_p)."""
        if c.p == 0:
            raise OrderZero("Companion matrix undefined for a VAR(0)")
        d, p = c.d, c.p
        k = np.zeros((d * p, d * p))
        k[:d, :] = c.stacked
        if p > 1:
            k[d:, :-d] = np.eye(d * (p - 1))
        return k

    @staticmethod
    def spectral_radius(c: VarCoefficients) -> float:
        if c.p == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(VarModelService.companion_matrix(c)))))

    @staticmethod
    def is_stable(c: VarCoefficients) -> bool:
        return VarModelService.spectral_radius(c) < 1.0 - STABILITY_MARGIN

    @staticmethod
    def dgp_coefficients(a: float = constants.DGP_A2_SIZE) -> VarCoefficients:
        """Bivariate VAR(2) of the simulation design; A_2 = a I_2."""
        return VarCoefficients(
            d=2, p=2, mats=[np.array(constants.DGP_A1), a * np.eye(2)]
        )

    @staticmethod
    def power_uncorrelated_coefficients() -> VarCoefficients:
        return VarCoefficients(d=2, p=1, mats=[constants.UNCORRELATED_POWER_A1 * np.eye(2)])

    # Volatility builders

    @staticmethod
    def _check_curve(curve: VolCurve) -> VolCurve:
        r = np.arange(1, PD_CHECK_POINTS + 1) / PD_CHECK_POINTS
        pts = np.concatenate([r, np.asarray(curve.breakpoints(), dtype=float)])
        sig = curve.sigma_at(pts)
        w = np.linalg.eigvalsh(MatrixService.symmetrize(sig))
        if np.any(w[:, 0] <= 0.0):
            bad = float(pts[int(np.argmin(w[:, 0]))])
            raise NotPositiveDefinite(f"Volatility curve is not positive definite at r={bad:.4f}")
        return curve

    @staticmethod
    def vol_constant(matrix: Any) -> VolCurve:
        m = MatrixService.check_symmetric(np.array(matrix, dtype=float, ndmin=2))
        curve = VolCurve(d=m.shape[0], kind="constant", params={"matrix": m.tolist()})
        return VarModelService._check_curve(curve)

    @staticmethod
    def vol_break_2d(
        s10: float,
        s11: float,
        s20: float,
        s21: float,
        tau1: float,
        tau2: float,
        cross: float = 0.0,
    ) -> VolCurve:
        """
        Two-regime diagonal curve Sigma_i(r) = s_i0 + (s_i1 - s_i0) 1{r >= tau_i}, with an
        optional constant correlation `cross` between the two components.
        """
        for name, value in (("s10", s10), ("s11", s11), ("s20", s20), ("s21", s21)):
            if value <= 0:
                raise NonPositiveVariance(f"{name} must be positive, got {value}")
        for name, value in (("tau1", tau1), ("tau2", tau2)):
            if not 0.0 <= value <= 1.0:
                raise InvalidBreakDate(f"{name} must lie in [0, 1], got {value}")
        if abs(cross) >= 1.0:
            raise NotPositiveDefinite(f"Correlation {cross} outside (-1, 1)")
        curve = VolCurve(
            d=2,
            kind="piecewise-constant-break",
            params={
                "pre": [s10, s20],
                "post": [s11, s21],
                "tau": [tau1, tau2],
                "coupling": [[1.0, cross], [cross, 1.0]],
            },
        )
        return VarModelService._check_curve(curve)

    @staticmethod
    def vol_smooth_trend(
        pi1: float = constants.TREND_PI1,
        pi2: float = constants.TREND_PI2,
        varpi: float = constants.VARPI,
    ) -> VolCurve:
        """Trending design: levels (1 + pi1 r, 0.1 + pi2 r), coupling [[1+varpi^2, varpi], [varpi, 1]]."""
        curve = VolCurve(
            d=2,
            kind="affine-trend",
            params={
                "intercept": [1.0, 0.1],
                "slope": [pi1, pi2],
                "coupling": [[1.0 + varpi ** 2, varpi], [varpi, 1.0]],
            },
        )
        return VarModelService._check_curve(curve)

    @staticmethod
    def vol_break_spec(
        varpi: float = constants.VARPI,
        rho: float = constants.BREAK_RHO,
    ) -> VolCurve:
        """Common break at r = 1/2: levels (6 + 54 1{r>=1/2}, 0.5 + 3 1{r>=1/2})."""
        base0, base1 = constants.BREAK_BASE
        jump0, jump1 = constants.BREAK_JUMP
        curve = VolCurve(
            d=2,
            kind="piecewise-constant-break",
            params={
                "pre": [base0, base1],
                "post": [base0 + jump0, base1 + jump1],
                "tau": [constants.BREAK_DATE, constants.BREAK_DATE],
                "coupling": [[1.0 + varpi ** 2, varpi], [varpi, 1.0 + rho ** 2]],
            },
        )
        return VarModelService._check_curve(curve)

    @staticmethod
    def vol_scalar_trend(pi1: float = constants.SCALAR_TREND_PI1, d: int = 2) -> VolCurve:
        """Sigma(r) = (1 + pi1 r) I_d."""
        curve = VolCurve(
            d=d,
            kind="affine-trend",
            params={
                "intercept": [1.0] * d,
                "slope": [pi1] * d,
                "coupling": np.eye(d).tolist(),
            },
        )
        return VarModelService._check_curve(curve)

    @staticmethod
    def vol_scalar_break(
        jump: float = constants.SCALAR_BREAK_JUMP,
        tau: float = constants.BREAK_DATE,
        d: int = 2,
    ) -> VolCurve:
        """Sigma(r) = (1 + jump 1{r >= tau}) I_d."""
        if not 0.0 <= tau <= 1.0:
            raise InvalidBreakDate(f"tau must lie in [0, 1], got {tau}")
        if 1.0 + jump <= 0:
            raise NonPositiveVariance(f"Post-break level {1.0 + jump} must be positive")
        curve = VolCurve(
            d=d,
            kind="piecewise-constant-break",
            params={
                "pre": [1.0] * d,
                "post": [1.0 + jump] * d,
                "tau": [tau] * d,
                "coupling": np.eye(d).tolist(),
            },
        )
        return VarModelService._check_curve(curve)

    @staticmethod
    def vol_custom_grid(grid: Sequence[float], matrices: Sequence[Any]) -> VolCurve:
        grid = [float(g) for g in grid]
        if not grid or grid[0] != 0.0:
            raise InvalidBreakDate("Custom grid must start at 0")
        if any(b <= a for a, b in zip(grid, grid[1:])) or grid[-1] > 1.0:
            raise InvalidBreakDate("Custom grid must be strictly increasing within [0, 1]")
        mats = [MatrixService.check_symmetric(np.array(m, dtype=float, ndmin=2)) for m in matrices]
        if len(mats) != len(grid):
            raise ValueError(f"{len(grid)} grid points but {len(mats)} matrices")
        d = mats[0].shape[0]
        curve = VolCurve(
            d=d,
            kind="custom-grid",
            params={"grid": grid, "matrices": [m.tolist() for m in mats]},
        )
        return VarModelService._check_curve(curve)

    @staticmethod
    def vol_from_json(data: Dict[str, Any]) -> VolCurve:
        """Validate a {kind, d, params} object (d inferred when absent)."""
        data = dict(data)
        if "d" not in data:
            params = data.get("params", {})
            if "matrix" in params:
                data["d"] = len(params["matrix"])
            elif "matrices" in params:
                data["d"] = len(params["matrices"][0])
            else:
                data["d"] = len(params.get("pre", params.get("intercept", [])))
        curve = VolCurve.model_validate(data)
        return VarModelService._check_curve(curve)

    @staticmethod
    def vol_to_json(curve: VolCurve) -> Dict[str, Any]:
        return curve.to_json_dict()

    # Simulation

    @staticmethod
    def make_rng(seed: int, stream: Optional[int] = None) -> np.random.Generator:
        """
        Counter-based generator keyed on (seed, stream).

        Streams are children of one SeedSequence, so replication k of a study draws
        the same numbers whichever worker runs it.
        """
        spawn_key = () if stream is None else (int(stream),)
        seq = np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key)
        return np.random.Generator(np.random.Philox(seq))

    @staticmethod
    def simulate(
        c: VarCoefficients,
        v: VolCurve,
        cfg: SimConfig,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        """
        T x d path X_t = sum_i A_i X_{t-i} + G(t/T) eps_t with zero initial values.

        A burn-in period, when requested, runs under the covariance frozen at r -> 0+
        and is discarded.
        """
        if not VarModelService.is_stable(c):
            raise UnstableModel(
                f"Spectral radius {VarModelService.spectral_radius(c):.6f} is not below 1"
            )
        if v.d != c.d:
            raise ValueError(f"Volatility dimension {v.d} differs from model dimension {c.d}")
        d, p, T, burn = c.d, c.p, cfg.T, cfg.burn_in
        rng = rng if rng is not None else VarModelService.make_rng(cfg.seed)
        n = burn + T

        if cfg.innovation is None:
            eps = rng.standard_normal((n, d))
        else:
            eps = np.asarray(cfg.innovation(rng, n, d), dtype=float).reshape(n, d)

        g_path = MatrixService.pd_sqrt_batch(v.path(T))
        if burn:
            g0 = MatrixService.pd_sqrt(v.sigma_at(R_START))
            g_path = np.concatenate([np.broadcast_to(g0, (burn, d, d)), g_path])
        u = np.einsum('tij,tj->ti', g_path, eps)

        if p == 0:
            return u[burn:].copy()

        x = np.zeros((n + p, d))
        mats = c.mats
        for t in range(n):
            acc = u[t].copy()
            for i in range(p):
                acc += mats[i] @ x[p + t - 1 - i]
            x[p + t] = acc
        logger.debug(f"Simulated VAR({p}) path, d={d}, T={T}, burn_in={burn}")
        return x[p + burn:].copy()
