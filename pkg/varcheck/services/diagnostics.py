"""
Residual autocovariances and their estimated asymptotic covariance matrices.

Index convention: gamma stacks vec(Gamma(1)), ..., vec(Gamma(m)) so that entry (i, j)
of Gamma(h) sits at position (h-1) d^2 + (j-1) d + (i-1); every d^2 m x d^2 m matrix
below follows the same ordering.
"""
import logging
from typing import Optional

import numpy as np
import pandas as pd
from scipy import stats

from varcheck.exceptions import EigenvalueOutOfRange, LagTooLarge
from varcheck.models.diagnostics import (
    AutocovPanel,
    ConfidenceBounds,
    DiagCovComponents,
    ResidualCovEstimate,
)
from varcheck.models.fit import LambdaSet, VarFit
from varcheck.services.estimators import EstimationService
from varcheck.services.matnum import MatrixService
from varcheck.services.var_model import VarModelService

logger = logging.getLogger(__name__)

# Sigma^GLS eigenvalues: clamped silently within CLAMP_TOL of [0, 1], with a note
# up to RANGE_TOL, rejected beyond it
CLAMP_TOL = 1e-6
RANGE_TOL = 1e-3


class DiagnosticsService:
    """Autocovariance panels, covariance assembly and confidence bounds."""

    @staticmethod
    def autocov_panel(residuals: np.ndarray, m: int, method: str = "OLS") -> AutocovPanel:
        """Sample autocovariances with divisor T; rho_b is set for GLS/ALS panels."""
        r = np.asarray(residuals, dtype=float)
        if r.ndim == 1:
            r = r[:, None]
        T, d = r.shape
        if m < 1:
            raise LagTooLarge(f"Number of lags must be positive, got {m}")
        if m >= T:
            raise LagTooLarge(f"m={m} must be smaller than T={T}")

        gamma0 = r.T @ r / T
        blocks = [r[h:].T @ r[:T - h] / T for h in range(1, m + 1)]
        gamma = np.concatenate([MatrixService.vec(b) for b in blocks])

        sd = np.sqrt(np.diag(gamma0))
        inv_sd = np.divide(1.0, sd, out=np.zeros_like(sd), where=sd > 0)
        rho_a = np.concatenate([MatrixService.vec(inv_sd[:, None] * b * inv_sd[None, :]) for b in blocks])
        if np.any(np.abs(rho_a) > 1.0 + 1e-8):
            logger.warning(f"Autocorrelation above one in absolute value: {np.max(np.abs(rho_a)):.4f}")

        method = method.upper()
        return AutocovPanel(
            m=m,
            d=d,
            T=T,
            gamma=gamma,
            gamma0=gamma0,
            rho_a=rho_a,
            rho_b=gamma.copy() if method in ("GLS", "ALS") else None,
            method=method,
        )

    @staticmethod
    def panel_for_fit(fit: VarFit, m: int) -> AutocovPanel:
        """Panel of u-residuals for OLS fits, of standardized residuals for GLS/ALS fits."""
        residuals = fit.residuals_eps if fit.is_weighted else fit.residuals_u
        return DiagnosticsService.autocov_panel(residuals, m, fit.method)

    @staticmethod
    def _lag_sum(core: np.ndarray, companion: Optional[np.ndarray], d: int, p: int, m: int) -> np.ndarray:
        """sum_i {e_m(i+1) e_p(1)' (x) core} {K^i' (x) I_d}, shape (d^2 m, d^2 p)."""
        if p == 0:
            return np.zeros((d * d * m, 0))
        eye = np.eye(d)
        out = np.zeros((d * d * m, d * d * p))
        power = np.eye(d * p)
        for i in range(m):
            top = power.T[:d, :]
            out[i * d * d:(i + 1) * d * d] = core @ np.kron(top, eye)
            power = companion @ power
        return out

    @staticmethod
    def diag_components(fit: VarFit, lambdas: LambdaSet, m: int) -> DiagCovComponents:
        d, p = fit.d, fit.p
        companion = VarModelService.companion_matrix(fit.coeffs) if p > 0 else None
        sigma_g = lambdas.sigma_G_hat

        phi = DiagnosticsService._lag_sum(np.kron(sigma_g, np.eye(d)), companion, d, p, m)
        lam_u_theta = DiagnosticsService._lag_sum(lambdas.sigma_G2_hat, companion, d, p, m)
        lam_eps_theta = None
        if lambdas.g_mixed_hat is not None:
            lam_eps_theta = DiagnosticsService._lag_sum(lambdas.g_mixed_hat, companion, d, p, m)

        return DiagCovComponents(
            m=m,
            d=d,
            p=p,
            phi_u_m=phi,
            lambda_u_theta=lam_u_theta,
            lambda_eps_theta=lam_eps_theta,
            lambda_u_u=np.kron(np.eye(m), lambdas.sigma_G2_hat),
            companion_hat=companion,
            s_u=np.sqrt(np.diag(sigma_g)),
        )

    @staticmethod
    def sigma_ols(comps: DiagCovComponents, lambdas: LambdaSet) -> np.ndarray:
        """Lambda_uu - L_ut L3^-1 Phi' - Phi L3^-1 L_ut' + Phi L3^-1 L2 L3^-1 Phi'."""
        if comps.p == 0:
            return MatrixService.symmetrize(comps.lambda_u_u)
        l3_inv = MatrixService.inv_spd(lambdas.lambda3_hat)
        phi = comps.phi_u_m
        cross = comps.lambda_u_theta @ l3_inv @ phi.T
        sandwich = phi @ l3_inv @ lambdas.lambda2_hat @ l3_inv @ phi.T
        return MatrixService.symmetrize(comps.lambda_u_u - cross - cross.T + sandwich)

    @staticmethod
    def sigma_gls(comps: DiagCovComponents, lambdas: LambdaSet) -> np.ndarray:
        """I - L Lambda1^-1 L' with L = Lambda^{eps,theta}_m."""
        n = comps.d * comps.d * comps.m
        if comps.p == 0:
            return np.eye(n)
        if comps.lambda_eps_theta is None or lambdas.lambda1_hat is None:
            raise ValueError("Sigma^GLS needs a GLS or ALS fit")
        ell = comps.lambda_eps_theta
        proj = ell @ MatrixService.solve_spd(lambdas.lambda1_hat, ell.T)
        return MatrixService.symmetrize(np.eye(n) - proj)

    @staticmethod
    def clamp_unit_spectrum(a: np.ndarray, range_tol: Optional[float] = RANGE_TOL):
        """Clamp eigenvalues into [0, 1]; returns (matrix, largest excursion)."""
        w, v = MatrixService.eigh(a)
        excursion = float(max(0.0, -w[0], w[-1] - 1.0)) if w.size else 0.0
        if range_tol is not None and excursion > range_tol:
            raise EigenvalueOutOfRange(
                f"Sigma^GLS eigenvalues span [{w[0]:.4f}, {w[-1]:.4f}], outside [0, 1] by {excursion:.3e}"
            )
        if excursion == 0.0:
            return a, 0.0
        clamped = (v * np.clip(w, 0.0, 1.0)) @ v.T
        return MatrixService.symmetrize(clamped), excursion

    @staticmethod
    def residual_cov(
        fit: VarFit,
        comps: DiagCovComponents,
        lambdas: LambdaSet,
        m: int,
        range_tol: Optional[float] = RANGE_TOL,
    ) -> ResidualCovEstimate:
        """
        Sigma^OLS and Psi^OLS for OLS fits, Sigma^GLS for GLS/ALS fits.

        `range_tol=None` turns the Sigma^GLS range check into a clamp with a note.
        """
        notes = []
        if fit.is_weighted:
            raw = DiagnosticsService.sigma_gls(comps, lambdas)
            sigma_gls, excursion = DiagnosticsService.clamp_unit_spectrum(raw, range_tol)
            if excursion > CLAMP_TOL:
                notes.append(f"Sigma^GLS eigenvalues clamped to [0, 1] (excursion {excursion:.3e})")
                logger.warning(notes[-1])
            return ResidualCovEstimate(m=m, d=fit.d, method=fit.method, sigma_gls=sigma_gls, notes=notes)

        sigma = DiagnosticsService.sigma_ols(comps, lambdas)
        scale = np.kron(np.ones(m), 1.0 / np.kron(comps.s_u, comps.s_u))
        psi = MatrixService.symmetrize(scale[:, None] * sigma * scale[None, :])
        if not MatrixService.is_psd(sigma, 1e-6):
            notes.append("Sigma^OLS estimate is not positive semi-definite")
            logger.warning(notes[-1])
        return ResidualCovEstimate(m=m, d=fit.d, method="OLS", sigma_ols=sigma, psi_ols=psi, notes=notes)

    @staticmethod
    def naive_cov(residuals: np.ndarray, x: np.ndarray, p: int, m: int) -> np.ndarray:
        """
        Homoscedastic-theory covariance of the normalized autocorrelations:
        {I_m (x) (S (x) S)^-1} {I_m (x) Sigma (x) Sigma - (M Sigma_X^-1 M') (x) Sigma} {...},
        M = T^-1 sum (r'_{t-1}, ..., r'_{t-m})' Z_t'.
        """
        r = np.asarray(residuals, dtype=float)
        if r.ndim == 1:
            r = r[:, None]
        T, d = r.shape
        sigma = r.T @ r / T
        cov = np.kron(np.eye(m), np.kron(sigma, sigma))
        if p > 0:
            z = EstimationService.design_matrix(x, p)
            lagged = EstimationService.design_matrix(r, m)
            moment = lagged.T @ z / T
            proj = moment @ MatrixService.solve_spd(z.T @ z / T, moment.T)
            cov = cov - np.kron(proj, sigma)
        sd = np.sqrt(np.diag(sigma))
        inv_sd = np.divide(1.0, sd, out=np.zeros_like(sd), where=sd > 0)
        scale = np.kron(np.ones(m), np.kron(inv_sd, inv_sd))
        return MatrixService.symmetrize(scale[:, None] * cov * scale[None, :])

    @staticmethod
    def confidence_bounds(
        panel: AutocovPanel,
        cov: ResidualCovEstimate,
        level: float = 0.95,
        naive: Optional[np.ndarray] = None,
    ) -> ConfidenceBounds:
        """Half-widths z_{(1+level)/2} sqrt(cov_jj / T); Psi^OLS for OLS panels, Sigma^GLS otherwise."""
        if not 0.0 < level < 1.0:
            raise ValueError(f"level must lie in (0, 1), got {level}")
        z = stats.norm.ppf(0.5 + level / 2.0)
        if panel.method == "OLS":
            if cov.psi_ols is None:
                raise ValueError("OLS bounds need Psi^OLS")
            robust_cov, estimate = cov.psi_ols, panel.rho_a
        else:
            if cov.sigma_gls is None:
                raise ValueError(f"{panel.method} bounds need Sigma^GLS")
            robust_cov, estimate = cov.sigma_gls, panel.rho_b
        robust = z * np.sqrt(np.clip(np.diag(robust_cov), 0.0, None) / panel.T)
        naive_bound = None
        if naive is not None:
            naive_bound = z * np.sqrt(np.clip(np.diag(naive), 0.0, None) / panel.T)
        return ConfidenceBounds(
            m=panel.m,
            d=panel.d,
            T=panel.T,
            level=level,
            method=panel.method,
            estimate=estimate,
            robust=robust,
            naive=naive_bound,
        )

    @staticmethod
    def bounds_table(bounds: ConfidenceBounds) -> pd.DataFrame:
        """Columns (lag, i, j, estimate, bound_robust, bound_naive)."""
        d = bounds.d
        records = []
        for pos, est in enumerate(bounds.estimate):
            lag, rem = divmod(pos, d * d)
            j, i = divmod(rem, d)
            records.append({
                "lag": lag + 1,
                "i": i + 1,
                "j": j + 1,
                "estimate": float(est),
                "bound_robust": float(bounds.robust[pos]),
                "bound_naive": float(bounds.naive[pos]) if bounds.naive is not None else np.nan,
            })
        columns = ["lag", "i", "j", "estimate", "bound_robust", "bound_naive"]
        return pd.DataFrame.from_records(records, columns=columns)

    @staticmethod
    def squared_residual_autocorrelations(residuals: np.ndarray, m: int, level: float = 0.95) -> pd.DataFrame:
        """Autocorrelations of the squared (demeaned) residual series with iid bounds."""
        r = np.asarray(residuals, dtype=float)
        if r.ndim == 1:
            r = r[:, None]
        T, d = r.shape
        if m >= T:
            raise LagTooLarge(f"m={m} must be smaller than T={T}")
        z = stats.norm.ppf(0.5 + level / 2.0)
        records = []
        for k in range(d):
            s = r[:, k] ** 2
            s = s - s.mean()
            denom = float(s @ s)
            for h in range(1, m + 1):
                acf = float(s[h:] @ s[:T - h] / denom) if denom > 0 else 0.0
                records.append({"lag": h, "series": k + 1, "autocorrelation": acf, "bound": z / np.sqrt(T)})
        return pd.DataFrame.from_records(records, columns=["lag", "series", "autocorrelation", "bound"])
