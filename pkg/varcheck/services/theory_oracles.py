"""
Closed-form ground truth: worked-example covariances for two-regime diagonal
volatility, the scalar-volatility constant c_sigma, and approximate Bahadur slopes
of three portmanteau statistics under a fixed VAR(1) alternative.
"""
import logging
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd
from scipy import integrate

from varcheck.exceptions import UnstableAlternative
from varcheck.models.oracles import PiecewiseVolIntegrals, SlopeReport, TwoRegimeSpec
from varcheck.models.var import VarCoefficients, VolCurve
from varcheck.services.matnum import MatrixService
from varcheck.services.var_model import VarModelService

logger = logging.getLogger(__name__)

QUAD_TOL = 1e-13


class TheoryOracleService:
    """Analytic values used as independent oracles."""

    # Two-regime integrals

    @staticmethod
    def _levels(spec: TwoRegimeSpec, r: np.ndarray):
        s1 = np.where(r >= spec.tau1, spec.s11, spec.s10)
        s2 = np.where(r >= spec.tau2, spec.s21, spec.s20)
        return s1, s2

    @staticmethod
    def _integrands(spec: TwoRegimeSpec) -> Dict[str, Callable[[np.ndarray], np.ndarray]]:
        def pick(fn):
            return lambda r: fn(*TheoryOracleService._levels(spec, np.asarray(r, dtype=float)))

        return {
            "s1": pick(lambda a, b: a),
            "s2": pick(lambda a, b: b),
            "s1_sq": pick(lambda a, b: a * a),
            "s2_sq": pick(lambda a, b: b * b),
            "s1_s2": pick(lambda a, b: a * b),
            "sqrt_s1_over_s2": pick(lambda a, b: np.sqrt(a / b)),
            "sqrt_s2_over_s1": pick(lambda a, b: np.sqrt(b / a)),
            "s1_over_s2": pick(lambda a, b: a / b),
            "s2_over_s1": pick(lambda a, b: b / a),
        }

    @staticmethod
    def two_regime_integrals(spec: TwoRegimeSpec) -> PiecewiseVolIntegrals:
        """Exact segment sums over the joint partition {0, tau1, tau2, 1}."""
        edges = np.unique(np.clip([0.0, spec.tau1, spec.tau2, 1.0], 0.0, 1.0))
        lengths = np.diff(edges)
        mids = 0.5 * (edges[:-1] + edges[1:])
        values = {
            name: float(np.sum(lengths * fn(mids)))
            for name, fn in TheoryOracleService._integrands(spec).items()
        }
        return PiecewiseVolIntegrals(**values)

    @staticmethod
    def two_regime_integrals_quad(spec: TwoRegimeSpec) -> PiecewiseVolIntegrals:
        """The same integrals by adaptive quadrature, split at the break dates."""
        points = sorted({t for t in (spec.tau1, spec.tau2) if 0.0 < t < 1.0})
        values = {}
        for name, fn in TheoryOracleService._integrands(spec).items():
            values[name] = TheoryOracleService._integrate_scalar(lambda r: float(fn(r)), points)
        return PiecewiseVolIntegrals(**values)

    @staticmethod
    def _integrate_scalar(fn: Callable[[float], float], points: List[float]) -> float:
        edges = [0.0] + list(points) + [1.0]
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            value, _ = integrate.quad(fn, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
            total += value
        return total

    # Worked examples (d = 2, VAR(1) fitted to white noise)

    @staticmethod
    def _block_diag(first: np.ndarray, rest: np.ndarray, m: int) -> np.ndarray:
        out = np.zeros((4 * m, 4 * m))
        out[:4, :4] = first
        for h in range(1, m):
            out[4 * h:4 * (h + 1), 4 * h:4 * (h + 1)] = rest
        return out

    @staticmethod
    def example1_cov(spec: TwoRegimeSpec, m: int) -> Dict[str, np.ndarray]:
        """
        Sigma^OLS = diag{0, I_{m-1} (x) diag(int S_a S_i)},
        Sigma_S^OLS (homoscedastic formula) = diag{0, I_{m-1} (x) diag(int S_a int S_i)},
        Sigma^GLS = diag{I - diag((int sqrt(S_a/S_i))^2 / int S_a/S_i), I_{4(m-1)}},
        with (a, i) running over the vec order (1,1), (1,2), (2,1), (2,2).
        """
        if m < 1:
            raise ValueError("m must be positive")
        v = TheoryOracleService.two_regime_integrals(spec)
        ols_block = np.diag([v.s1_sq, v.s1_s2, v.s1_s2, v.s2_sq])
        spurious_block = np.diag([v.s1 * v.s1, v.s1 * v.s2, v.s2 * v.s1, v.s2 * v.s2])
        gls_first = np.diag([
            0.0,
            1.0 - v.sqrt_s1_over_s2 ** 2 / v.s1_over_s2,
            1.0 - v.sqrt_s2_over_s1 ** 2 / v.s2_over_s1,
            0.0,
        ])
        return {
            "sigma_ols": TheoryOracleService._block_diag(np.zeros((4, 4)), ols_block, m),
            "sigma_s_ols": TheoryOracleService._block_diag(np.zeros((4, 4)), spurious_block, m),
            "sigma_gls": TheoryOracleService._block_diag(gls_first, np.eye(4), m),
        }

    @staticmethod
    def example2_delta(spec: TwoRegimeSpec, m: int) -> np.ndarray:
        """Delta^OLS = diag{0, I_{m-1} (x) diag(int S_a S_i / (int S_a int S_i))}."""
        v = TheoryOracleService.two_regime_integrals(spec)
        block = np.diag([
            v.s1_sq / v.s1 ** 2,
            v.s1_s2 / (v.s1 * v.s2),
            v.s1_s2 / (v.s1 * v.s2),
            v.s2_sq / v.s2 ** 2,
        ])
        return TheoryOracleService._block_diag(np.zeros((4, 4)), block, m)

    @staticmethod
    def example1_figure_grid(
        taus: Iterable[float],
        levels: Iterable[float],
        s11: Optional[float] = None,
    ) -> pd.DataFrame:
        """
        Sigma^GLS (2,2) entry and the lag-2 (2,1) ratio Sigma^OLS / Sigma_S^OLS over a grid
        of common break dates and post-break levels of the second component (pre-break
        levels 1; the first component's post-break level follows the second unless given).
        """
        records = []
        for tau in taus:
            for level in levels:
                spec = TwoRegimeSpec(
                    s10=1.0, s20=1.0, s21=level, s11=level if s11 is None else s11, tau1=tau, tau2=tau
                )
                cov = TheoryOracleService.example1_cov(spec, 2)
                records.append({
                    "tau": float(tau),
                    "s21": float(level),
                    "sigma_gls_22": float(cov["sigma_gls"][1, 1]),
                    "ols_ratio_lag2_21": float(cov["sigma_ols"][5, 5] / cov["sigma_s_ols"][5, 5]),
                })
        return pd.DataFrame.from_records(records)

    # Scalar volatility

    @staticmethod
    def c_sigma(vol: VolCurve) -> float:
        """int sigma^4 / (int sigma^2)^2 for sigma^2(r) = Sigma(r)[0, 0]."""
        if vol.kind == "constant":
            return 1.0
        if vol.kind == "piecewise-constant-break":
            a, b = float(vol.params["pre"][0]), float(vol.params["post"][0])
            tau = float(vol.params["tau"][0])
            return (tau * a * a + (1.0 - tau) * b * b) / (tau * a + (1.0 - tau) * b) ** 2
        if vol.kind == "affine-trend":
            c = float(vol.params["intercept"][0]) * float(np.asarray(vol.params["coupling"])[0][0])
            s = float(vol.params["slope"][0]) * float(np.asarray(vol.params["coupling"])[0][0])
            return (c * c + c * s + s * s / 3.0) / (c + s / 2.0) ** 2
        points = vol.breakpoints()
        m2 = TheoryOracleService._integrate_scalar(lambda r: float(vol.sigma_at(r)[0, 0]), points)
        m4 = TheoryOracleService._integrate_scalar(lambda r: float(vol.sigma_at(r)[0, 0]) ** 2, points)
        return m4 / (m2 * m2)

    @staticmethod
    def c_sigma_hat(sigma_G: np.ndarray, sigma_G2: np.ndarray) -> float:
        """Plug-in (tr(Sigma_G(x)2) / d^2) / (tr(Sigma_G) / d)^2."""
        d = sigma_G.shape[0]
        return float((np.trace(sigma_G2) / d ** 2) / (np.trace(sigma_G) / d) ** 2)

    # Bahadur slopes

    @staticmethod
    def integrate_matrix(vol: VolCurve, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """int_0^1 func(Sigma(r)) dr, piece by piece between the curve's break points."""
        edges = [0.0] + vol.breakpoints() + [1.0]
        total = None
        for a, b in zip(edges[:-1], edges[1:]):
            value, _ = integrate.quad_vec(
                lambda r: func(vol.sigma_at(r)), a, b, epsabs=QUAD_TOL, epsrel=1e-12, limit=200
            )
            total = value if total is None else total + value
        return total

    @staticmethod
    def bahadur_slopes(b_mat: np.ndarray, vol: VolCurve, m: int) -> SlopeReport:
        """
        Limits of T^-1 Q under X_t = B X_{t-1} + u_t for the tests of p = 0:
          Q^OLS:           B' {I_m (x) S (x) S^-1} B,  slope = form / max delta^OLS
          underline Q:     B' {I_m (x) (S (x) I) S2^-1 (S (x) I)} B
          Q^ALS:           B' {I_m (x) M'M} B
        with B = vec(B^1 ... B^m), S = int Sigma, S2 = int Sigma (x) Sigma and M = int G' (x) G^-1.
        """
        b_mat = np.atleast_2d(np.asarray(b_mat, dtype=float))
        d = b_mat.shape[0]
        if vol.d != d:
            raise ValueError(f"Alternative dimension {d} differs from volatility dimension {vol.d}")
        coeffs = VarCoefficients(d=d, p=1, mats=[b_mat])
        if not VarModelService.is_stable(coeffs):
            raise UnstableAlternative(
                f"Alternative has spectral radius {VarModelService.spectral_radius(coeffs):.6f}"
            )

        closed = vol.kind in ("constant", "piecewise-constant-break", "custom-grid")
        s = TheoryOracleService.integrate_matrix(vol, lambda sig: sig)
        s2 = TheoryOracleService.integrate_matrix(vol, lambda sig: np.kron(sig, sig))

        def mixed(sig: np.ndarray) -> np.ndarray:
            root = MatrixService.pd_sqrt(sig)
            return np.kron(root.T, np.linalg.inv(root))

        g_mixed = TheoryOracleService.integrate_matrix(vol, mixed)

        powers = []
        power = np.eye(d)
        for _ in range(m):
            power = b_mat @ power
            powers.append(MatrixService.vec(power))
        stacked = np.concatenate(powers)

        s_inv = MatrixService.inv_spd(s)
        eye = np.eye(d)
        w_ols = np.kron(np.eye(m), np.kron(s, s_inv))
        left = np.kron(s, eye)
        w_under = np.kron(np.eye(m), left @ MatrixService.inv_spd(s2) @ left)
        w_als = np.kron(np.eye(m), g_mixed.T @ g_mixed)

        root_inv = MatrixService.pd_inv_sqrt(s)
        scale = np.kron(root_inv, root_inv)
        max_delta = float(MatrixService.eigvals_sym(scale @ s2 @ scale)[0])

        form_ols = float(stacked @ w_ols @ stacked)
        report = SlopeReport(
            m=m,
            form_ols=form_ols,
            max_delta_ols=max_delta,
            slope_ols=form_ols / max_delta,
            slope_ols_underline=float(stacked @ w_under @ stacked),
            slope_als=float(stacked @ w_als @ stacked),
            method="closed-form" if closed else "quadrature",
        )
        logger.debug(
            f"Bahadur slopes (m={m}): OLS={report.slope_ols:.6g}, "
            f"underline={report.slope_ols_underline:.6g}, ALS={report.slope_als:.6g}"
        )
        return report

    @staticmethod
    def oracle_fixture() -> Dict[str, object]:
        """Reference values shared with the test suite."""
        spec = TwoRegimeSpec(s10=1.0, s11=0.5, s20=1.0, s21=1.0, tau1=0.5, tau2=0.5)
        cov = TheoryOracleService.example1_cov(spec, 2)
        delta = TheoryOracleService.example2_delta(spec, 2)
        trend = VarModelService.vol_scalar_trend()
        two_regime = VarModelService.vol_scalar_break(jump=3.0)
        return {
            "example1": {
                "spec": spec.model_dump(),
                "sigma_ols_lag2_11": float(cov["sigma_ols"][4, 4]),
                "sigma_gls_22": float(cov["sigma_gls"][1, 1]),
            },
            "example2": {"spec": spec.model_dump(), "delta_lag2_11": float(delta[4, 4])},
            "c_sigma": {
                "scalar_trend_150": TheoryOracleService.c_sigma(trend),
                "two_regime_1_4": TheoryOracleService.c_sigma(two_regime),
            },
        }
