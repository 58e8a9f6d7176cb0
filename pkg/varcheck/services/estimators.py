"""
OLS, GLS (known volatility) and ALS (kernel-estimated volatility) estimation of
VAR(p) coefficients, and the sample moment matrices of the residual asymptotics.

All sums run over t = 1..T with the pre-sample values X_{-p+1}, ..., X_0 set to zero.
The regressor of time t is the dp-vector Z_t = (X'_{t-1}, ..., X'_{t-p})', so that
X_t = (Z_t' (x) I_d) theta + u_t.
"""
import logging
from typing import Optional

import numpy as np
import pandas as pd

from varcheck.exceptions import SingularDesign, SingularMatrix
from varcheck.models.fit import LambdaSet, VarFit
from varcheck.models.kernel import KernelConfig
from varcheck.models.var import VarCoefficients, VolCurve
from varcheck.services.matnum import MatrixService
from varcheck.services.vol_kernel import VolKernelService

logger = logging.getLogger(__name__)

DESIGN_COND_LIMIT = 1e12


class EstimationService:
    """Least-squares estimation of VAR coefficients."""

    @staticmethod
    def _as_panel(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] < 2:
            raise ValueError(f"Expected a T x d panel with T >= 2, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("Panel contains non-finite values")
        return x

    @staticmethod
    def design_matrix(x: np.ndarray, p: int) -> np.ndarray:
        """T x dp matrix whose row t is Z_t' (zero-padded before the sample)."""
        x = EstimationService._as_panel(x)
        T, d = x.shape
        z = np.zeros((T, d * p))
        for i in range(1, p + 1):
            z[i:, (i - 1) * d:i * d] = x[:T - i]
        return z

    @staticmethod
    def _check_order(T: int, d: int, p: int) -> None:
        if p < 0:
            raise ValueError(f"Order must be nonnegative, got {p}")
        if p > 0 and T <= d * p + 1:
            raise SingularDesign(f"T={T} too short for a VAR({p}) in dimension {d}")

    @staticmethod
    def _solve_design(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        cond = MatrixService.cond_sym(gram)
        if not np.isfinite(cond) or cond > DESIGN_COND_LIMIT:
            raise SingularDesign(f"Design moment matrix is numerically singular (cond={cond:.3e})")
        try:
            return MatrixService.solve_spd(gram, rhs)
        except SingularMatrix as e:
            raise SingularDesign(str(e)) from e

    @staticmethod
    def _kron_rows(z: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Rows Z_t (x) u_t, shape (T, dp*d)."""
        return np.einsum('ta,ti->tai', z, u).reshape(z.shape[0], -1)

    @staticmethod
    def _ols_theta_cov(z: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Lambda3^{-1} Lambda2 Lambda3^{-1}."""
        T, d = u.shape
        if z.shape[1] == 0:
            return np.zeros((0, 0))
        w = EstimationService._kron_rows(z, u)
        lambda2 = w.T @ w / T
        lambda3_inv = np.kron(MatrixService.inv_spd(z.T @ z / T), np.eye(d))
        return MatrixService.symmetrize(lambda3_inv @ lambda2 @ lambda3_inv)

    @staticmethod
    def fit_ols(x: np.ndarray, p: int) -> VarFit:
        x = EstimationService._as_panel(x)
        T, d = x.shape
        EstimationService._check_order(T, d, p)
        z = EstimationService.design_matrix(x, p)

        if p == 0:
            coeffs = VarCoefficients(d=d, p=0, mats=[])
            u = x.copy()
        else:
            a_t = EstimationService._solve_design(z.T @ z, z.T @ x)
            coeffs = VarCoefficients.from_theta(MatrixService.vec(a_t.T), d, p)
            u = x - z @ a_t

        logger.debug(f"OLS fit: d={d}, p={p}, T={T}")
        return VarFit(
            method="OLS",
            coeffs=coeffs,
            residuals_u=u,
            theta_cov=EstimationService._ols_theta_cov(z, u),
            nobs=T,
        )

    @staticmethod
    def weighted_gram(z: np.ndarray, sigma_inv: np.ndarray) -> np.ndarray:
        """T^{-1} sum_t Z_t Z_t' (x) Sigma_t^{-1}."""
        T, dp = z.shape
        d = sigma_inv.shape[1]
        gram = np.einsum('ta,tb,tij->aibj', z, z, sigma_inv).reshape(dp * d, dp * d) / T
        return MatrixService.symmetrize(gram)

    @staticmethod
    def _fit_weighted(x: np.ndarray, p: int, sigma_t: np.ndarray, h_t: np.ndarray, method: str):
        """Normal equations weighted by Sigma_t^{-1}; returns coefficients, u, eps, theta_cov."""
        T, d = x.shape
        z = EstimationService.design_matrix(x, p)
        sigma_inv = MatrixService.inv_batch(sigma_t)
        h_inv = MatrixService.inv_batch(h_t)

        if p == 0:
            coeffs = VarCoefficients(d=d, p=0, mats=[])
            theta_cov = np.zeros((0, 0))
            u = x.copy()
        else:
            gram = EstimationService.weighted_gram(z, sigma_inv)
            rhs = np.einsum('tij,tj,ta->ai', sigma_inv, x, z).reshape(-1) / T
            theta = EstimationService._solve_design(gram, rhs)
            coeffs = VarCoefficients.from_theta(theta, d, p)
            theta_cov = MatrixService.inv_spd(gram)
            u = x - z @ coeffs.stacked.T
        eps = np.einsum('tij,tj->ti', h_inv, u)
        logger.debug(f"{method} fit: d={d}, p={p}, T={T}")
        return coeffs, u, eps, theta_cov

    @staticmethod
    def fit_gls(x: np.ndarray, p: int, vol: VolCurve) -> VarFit:
        """Infeasible GLS with the true covariance path Sigma_t = Sigma(t/T)."""
        x = EstimationService._as_panel(x)
        T, d = x.shape
        EstimationService._check_order(T, d, p)
        if vol.d != d:
            raise ValueError(f"Volatility dimension {vol.d} differs from data dimension {d}")
        sigma_t = MatrixService.symmetrize(vol.path(T))
        h_t = MatrixService.pd_sqrt_batch(sigma_t)
        coeffs, u, eps, theta_cov = EstimationService._fit_weighted(x, p, sigma_t, h_t, "GLS")
        return VarFit(
            method="GLS",
            coeffs=coeffs,
            residuals_u=u,
            residuals_eps=eps,
            vol_curve=vol,
            sigma_t=sigma_t,
            h_t=h_t,
            theta_cov=theta_cov,
            nobs=T,
        )

    @staticmethod
    def fit_als(x: np.ndarray, p: int, cfg: Optional[KernelConfig] = None) -> VarFit:
        """OLS, kernel volatility estimate on the OLS residuals, then weighted refit."""
        x = EstimationService._as_panel(x)
        T, d = x.shape
        ols = EstimationService.fit_ols(x, p)
        vol_path = VolKernelService.estimate(ols.residuals_u, cfg or KernelConfig())
        coeffs, u, eps, theta_cov = EstimationService._fit_weighted(
            x, p, vol_path.sigma_t, vol_path.h_t, "ALS"
        )
        return VarFit(
            method="ALS",
            coeffs=coeffs,
            residuals_u=u,
            residuals_eps=eps,
            vol_path=vol_path,
            sigma_t=vol_path.sigma_t,
            h_t=vol_path.h_t,
            theta_cov=theta_cov,
            nobs=T,
        )

    @staticmethod
    def fit(
        x: np.ndarray,
        p: int,
        method: str = "OLS",
        vol: Optional[VolCurve] = None,
        kernel: Optional[KernelConfig] = None,
    ) -> VarFit:
        method = method.upper()
        if method == "OLS":
            return EstimationService.fit_ols(x, p)
        if method == "GLS":
            if vol is None:
                raise ValueError("GLS estimation needs the volatility curve")
            return EstimationService.fit_gls(x, p, vol)
        if method == "ALS":
            return EstimationService.fit_als(x, p, kernel)
        raise ValueError(f"Unknown estimation method '{method}'")

    @staticmethod
    def lambda_set(fit: VarFit, x: np.ndarray) -> LambdaSet:
        """Sample moments Lambda_1..3, Sigma_G, Sigma_G(x)2 and T^{-1} sum H_t' (x) H_t^{-1}."""
        x = EstimationService._as_panel(x)
        T, d = x.shape
        p = fit.p
        u = fit.residuals_u
        z = EstimationService.design_matrix(x, p)

        sigma_g = MatrixService.symmetrize(u.T @ u / T)
        lagged = np.einsum('ti,tj->tij', u[:-1], u[1:]).reshape(T - 1, d * d)
        sigma_g2 = MatrixService.symmetrize(lagged.T @ lagged / T)

        if p > 0:
            w = EstimationService._kron_rows(z, u)
            lambda2 = MatrixService.symmetrize(w.T @ w / T)
            lambda3 = np.kron(MatrixService.symmetrize(z.T @ z / T), np.eye(d))
        else:
            lambda2 = np.zeros((0, 0))
            lambda3 = np.zeros((0, 0))

        lambda1 = g_mixed = None
        if fit.is_weighted:
            if p > 0:
                lambda1 = EstimationService.weighted_gram(z, MatrixService.inv_batch(fit.sigma_t))
            else:
                lambda1 = np.zeros((0, 0))
            h_inv = MatrixService.inv_batch(fit.h_t)
            g_mixed = np.einsum('tji,tkl->ikjl', fit.h_t, h_inv).reshape(d * d, d * d) / T

        return LambdaSet(
            lambda1_hat=lambda1,
            lambda2_hat=lambda2,
            lambda3_hat=lambda3,
            sigma_G_hat=sigma_g,
            sigma_G2_hat=sigma_g2,
            g_mixed_hat=g_mixed,
        )

    @staticmethod
    def standard_errors(fit: VarFit) -> np.ndarray:
        """sqrt(diag(theta_cov) / T), aligned with theta."""
        if fit.p == 0:
            return np.zeros(0)
        return np.sqrt(np.clip(np.diag(fit.theta_cov), 0.0, None) / fit.nobs)

    @staticmethod
    def coefficient_table(fit: VarFit, digits: int = 2) -> pd.DataFrame:
        """One row per coefficient A_i[k,l]: estimate, standard error and 'est[se]' display."""
        se = EstimationService.standard_errors(fit)
        theta = fit.coeffs.theta
        d = fit.d
        records = []
        for idx, (est, s) in enumerate(zip(theta, se)):
            lag, rem = divmod(idx, d * d)
            col, row = divmod(rem, d)
            records.append({
                "coefficient": f"A{lag + 1}[{row + 1},{col + 1}]",
                "lag": lag + 1,
                "row": row + 1,
                "col": col + 1,
                "estimate": float(est),
                "std_error": float(s),
                "display": f"{est:.{digits}f}[{s:.{digits}f}]",
            })
        columns = ["coefficient", "lag", "row", "col", "estimate", "std_error", "display"]
        return pd.DataFrame.from_records(records, columns=columns)
