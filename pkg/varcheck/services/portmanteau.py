"""
Portmanteau statistics and their reference laws.

Families:
  naive      Ljung-Box on OLS residuals against chi-square(d^2 (m - p))
  OLS        Box-Pierce / Ljung-Box on OLS residuals against the weighted chi-square
             law with weights the eigenvalues of Delta^OLS
  ALS / GLS  statistics on standardized residuals against the weighted law with
             weights the eigenvalues of Sigma^GLS; variant a normalizes by Gamma(0),
             variant b does not
  modified   Wald-type forms projecting out the estimation effect, chi-square(d^2 (m - p)),
             Box-Pierce (BP~) and lag-weighted Ljung-Box (LB~) versions
"""
import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from varcheck import constants
from varcheck.config import Config
from varcheck.exceptions import EigenvalueOutOfRange, SingularGamma0, SingularMatrix, VarCheckError
from varcheck.models.diagnostics import AutocovPanel, DiagCovComponents, ResidualCovEstimate
from varcheck.models.fit import VarFit
from varcheck.models.report import TestReport, WeightedChiSq
from varcheck.services.diagnostics import RANGE_TOL, DiagnosticsService
from varcheck.services.estimators import EstimationService
from varcheck.services.matnum import MatrixService
from varcheck.services.quadform import QuadFormService

logger = logging.getLogger(__name__)

CROSS_CHECK_TOL = 1e-10


class PortmanteauService:
    """Box-Pierce and Ljung-Box statistics, weights and p-values."""

    @staticmethod
    def _gamma0_inverse(panel: AutocovPanel) -> np.ndarray:
        cond = MatrixService.cond_sym(panel.gamma0)
        if not np.isfinite(cond) or cond > Config.GAMMA0_COND_LIMIT:
            raise SingularGamma0(f"Gamma(0) is numerically singular (cond={cond:.3e})")
        try:
            return MatrixService.inv_spd(panel.gamma0)
        except SingularMatrix as e:
            raise SingularGamma0(str(e)) from e

    @staticmethod
    def _lag_factors(T: int, m: int, ljung_box: bool) -> np.ndarray:
        h = np.arange(1, m + 1)
        return T * T / (T - h) if ljung_box else np.full(m, float(T))

    @staticmethod
    def trace_statistic(panel: AutocovPanel, m: int, ljung_box: bool, normalize: bool = True) -> float:
        """
        sum_h c_h tr(Gamma(h)' G0 Gamma(h) G0) with c_h = T (BP) or T^2 / (T - h) (LB);
        G0 = Gamma(0)^-1 when normalizing, I otherwise.
        """
        if m > panel.m:
            raise ValueError(f"Panel holds {panel.m} lags, {m} requested")
        g0 = PortmanteauService._gamma0_inverse(panel) if normalize else np.eye(panel.d)
        factors = PortmanteauService._lag_factors(panel.T, m, ljung_box)
        total = 0.0
        for h in range(1, m + 1):
            g = panel.gamma_lag(h)
            total += factors[h - 1] * float(np.trace(g.T @ g0 @ g @ g0))
        return total

    @staticmethod
    def kron_statistic(panel: AutocovPanel, m: int, ljung_box: bool, normalize: bool = True) -> float:
        """The same statistic as T gamma' {I_m (x) G0 (x) G0} gamma, lag-weighted for LB."""
        g0 = PortmanteauService._gamma0_inverse(panel) if normalize else np.eye(panel.d)
        d2 = panel.d * panel.d
        factors = PortmanteauService._lag_factors(panel.T, m, ljung_box)
        gamma = panel.gamma[:d2 * m] * np.sqrt(np.repeat(factors, d2))
        weight = np.kron(np.eye(m), np.kron(g0, g0))
        return float(gamma @ weight @ gamma)

    @staticmethod
    def checked_statistic(panel: AutocovPanel, m: int, ljung_box: bool, normalize: bool) -> Tuple[float, List[str]]:
        """Trace form of the statistic plus report notes; the Kronecker form must agree."""
        stat = PortmanteauService.trace_statistic(panel, m, ljung_box, normalize)
        alt = PortmanteauService.kron_statistic(panel, m, ljung_box, normalize)
        if abs(stat - alt) > CROSS_CHECK_TOL * max(1.0, abs(stat)):
            logger.error(f"Trace and Kronecker forms disagree: {stat!r} vs {alt!r}")
            return stat, [f"trace and Kronecker forms disagree: {stat:.12g} vs {alt:.12g}"]
        return stat, []

    @staticmethod
    def bp_ols(panel: AutocovPanel, m: int) -> float:
        return PortmanteauService.checked_statistic(panel, m, ljung_box=False, normalize=True)[0]

    @staticmethod
    def lb_ols(panel: AutocovPanel, m: int) -> float:
        return PortmanteauService.checked_statistic(panel, m, ljung_box=True, normalize=True)[0]

    @staticmethod
    def bp_als(panel: AutocovPanel, m: int, variant: str = "a") -> float:
        """Variant a normalizes by Gamma(0)^-1; variant b is T rho_b' rho_b."""
        return PortmanteauService.checked_statistic(panel, m, ljung_box=False, normalize=variant == "a")[0]

    @staticmethod
    def lb_als(panel: AutocovPanel, m: int, variant: str = "a") -> float:
        return PortmanteauService.checked_statistic(panel, m, ljung_box=True, normalize=variant == "a")[0]

    # Laws

    @staticmethod
    def delta_ols(cov: ResidualCovEstimate, sigma_G: np.ndarray) -> np.ndarray:
        """{I_m (x) S^-1/2 (x) S^-1/2} Sigma^OLS {I_m (x) S^-1/2 (x) S^-1/2} with S = Sigma_G."""
        if cov.sigma_ols is None:
            raise ValueError("Delta^OLS needs Sigma^OLS")
        root = MatrixService.pd_inv_sqrt(sigma_G)
        scale = np.kron(np.eye(cov.m), np.kron(root, root))
        return MatrixService.symmetrize(scale @ cov.sigma_ols @ scale)

    @staticmethod
    def weights_ols(cov: ResidualCovEstimate, sigma_G: np.ndarray) -> WeightedChiSq:
        eig = MatrixService.eigvals_sym(PortmanteauService.delta_ols(cov, sigma_G))
        if eig.size and eig[-1] < 0:
            logger.debug(f"Clamping {int(np.sum(eig < 0))} negative Delta^OLS eigenvalues (min {eig[-1]:.3e})")
        return WeightedChiSq(weights=np.clip(eig, 0.0, None))

    @staticmethod
    def weights_als(cov: ResidualCovEstimate, range_tol: Optional[float] = RANGE_TOL) -> WeightedChiSq:
        if cov.sigma_gls is None:
            raise ValueError("ALS weights need Sigma^GLS")
        eig = MatrixService.eigvals_sym(cov.sigma_gls)
        excursion = float(max(0.0, -eig[-1], eig[0] - 1.0)) if eig.size else 0.0
        if range_tol is not None and excursion > range_tol:
            raise EigenvalueOutOfRange(f"Sigma^GLS eigenvalues outside [0, 1] by {excursion:.3e}")
        return WeightedChiSq(weights=np.clip(eig, 0.0, 1.0))

    @staticmethod
    def scaled_gamma(panel: AutocovPanel, m: int, ljung_box: bool) -> np.ndarray:
        """gamma_m, with lag h scaled by sqrt(T / (T - h)) for the Ljung-Box form."""
        d2 = panel.d * panel.d
        gamma = panel.gamma[:d2 * m].copy()
        if not ljung_box:
            return gamma
        factors = PortmanteauService._lag_factors(panel.T, m, ljung_box=True) / panel.T
        return gamma * np.sqrt(np.repeat(factors, d2))

    @staticmethod
    def projector_ols(phi: np.ndarray, lam: np.ndarray) -> np.ndarray:
        """
        D = Phi (Phi' L^-1 Phi)^-1 Phi' L^-1, the projector onto the columns of Phi
        that is orthogonal in the L^-1 metric; (I - D) Phi = 0.

        Raises:
            SingularMatrix: Phi' L^-1 Phi above the modified-statistic condition limit
        """
        lam_inv = MatrixService.inv_spd(lam)
        left = lam_inv @ phi
        gram = MatrixService.symmetrize(phi.T @ left)
        cond = MatrixService.cond_sym(gram)
        if not np.isfinite(cond) or cond > Config.MODIFIED_COND_LIMIT:
            raise SingularMatrix(f"Phi' Lambda^-1 Phi not invertible (cond={cond:.3e})")
        return phi @ MatrixService.solve_spd(gram, left.T)

    @staticmethod
    def _modified_df(d: int, m: int, p: int) -> int:
        return d * d * (m - p) if p > 0 else d * d * m

    @staticmethod
    def modified_ols(
        panel: AutocovPanel,
        comps: DiagCovComponents,
        name: Optional[str] = None,
        ljung_box: bool = False,
    ) -> TestReport:
        """T g' (I - D)' L^-1 (I - D) g with L = Lambda^{u,u}_m and D = projector_ols(Phi^u_m, L)."""
        name = name or (constants.MOD_OLS if ljung_box else constants.MOD_BP_OLS)
        m, d, p = comps.m, comps.d, comps.p
        df = PortmanteauService._modified_df(d, m, p)
        if p > 0 and m <= p:
            return TestReport(name=name, m=m, law="chisq", df=df, feasible=False, notes=["m must exceed p"])
        lam = comps.lambda_u_u
        cond = MatrixService.cond_sym(lam)
        if not np.isfinite(cond) or cond > Config.MODIFIED_COND_LIMIT:
            return PortmanteauService._not_available(name, m, df, f"Lambda^uu not invertible (cond={cond:.3e})")
        lam_inv = MatrixService.inv_spd(lam)
        weight = lam_inv
        if p > 0:
            try:
                proj = PortmanteauService.projector_ols(comps.phi_u_m, lam)
            except SingularMatrix as e:
                return PortmanteauService._not_available(name, m, df, str(e))
            keep = np.eye(proj.shape[0]) - proj
            weight = MatrixService.symmetrize(keep.T @ lam_inv @ keep)
        g = PortmanteauService.scaled_gamma(panel, m, ljung_box)
        stat = max(0.0, float(panel.T * g @ weight @ g))
        return TestReport(
            name=name, m=m, statistic=stat, law="chisq", df=df,
            p_value=QuadFormService.chisq_sf(stat, df),
        )

    @staticmethod
    def modified_als(
        panel: AutocovPanel,
        comps: DiagCovComponents,
        name: Optional[str] = None,
        ljung_box: bool = False,
    ) -> TestReport:
        """T g' (I - L (L'L)^-1 L') g with L = Lambda^{eps,theta}_m."""
        name = name or (constants.MOD_ALS if ljung_box else constants.MOD_BP_ALS)
        m, d, p = comps.m, comps.d, comps.p
        df = PortmanteauService._modified_df(d, m, p)
        if p > 0 and m <= p:
            return TestReport(name=name, m=m, law="chisq", df=df, feasible=False, notes=["m must exceed p"])
        g = PortmanteauService.scaled_gamma(panel, m, ljung_box)
        resid = g
        if p > 0:
            if comps.lambda_eps_theta is None:
                raise ValueError("Modified ALS statistic needs Lambda^{eps,theta}_m")
            ell = comps.lambda_eps_theta
            gram = MatrixService.symmetrize(ell.T @ ell)
            cond = MatrixService.cond_sym(gram)
            if not np.isfinite(cond) or cond > Config.MODIFIED_COND_LIMIT:
                return PortmanteauService._not_available(name, m, df, f"L'L not invertible (cond={cond:.3e})")
            resid = g - ell @ MatrixService.solve_spd(gram, ell.T @ g)
        stat = float(panel.T * resid @ resid)
        return TestReport(
            name=name, m=m, statistic=stat, law="chisq", df=df,
            p_value=QuadFormService.chisq_sf(stat, df),
        )

    @staticmethod
    def _not_available(name: str, m: int, df: int, reason: str) -> TestReport:
        logger.warning(f"{name} (m={m}) not available: {reason}")
        return TestReport(name=name, m=m, law="chisq", df=df, feasible=False, notes=[reason])

    @staticmethod
    def weighted_report(name: str, m: int, stat: float, law: WeightedChiSq, notes=None) -> TestReport:
        return TestReport(
            name=name,
            m=m,
            statistic=stat,
            law="weighted-chisq",
            weights=law.weights.tolist(),
            p_value=QuadFormService.upper_tail(law, stat),
            notes=list(notes or []),
        )

    @staticmethod
    def naive_report(name: str, m: int, stat: float, d: int, p: int, notes=None) -> TestReport:
        df = max(1, d * d * (m - p))
        notes = list(notes or [])
        if d * d * (m - p) < 1:
            notes.append("degrees of freedom clamped to 1")
        return TestReport(
            name=name, m=m, statistic=stat, law="chisq-naive", df=df,
            p_value=QuadFormService.chisq_sf(stat, df), notes=notes,
        )

    # Orchestration

    @staticmethod
    def _weighted_from_panel(
        name: str, panel: AutocovPanel, m: int, ljung_box: bool, variant: str, law: WeightedChiSq, notes: List[str]
    ) -> TestReport:
        stat, check = PortmanteauService.checked_statistic(panel, m, ljung_box, normalize=variant == "a")
        return PortmanteauService.weighted_report(name, m, stat, law, list(notes) + check)

    @staticmethod
    def _guarded(name: str, m: int, law: str, build) -> TestReport:
        try:
            return build()
        except VarCheckError as e:
            logger.warning(f"{name} (m={m}) failed: {e}")
            return TestReport(name=name, m=m, law=law, feasible=False, notes=[f"{type(e).__name__}: {e}"])

    @staticmethod
    def ols_reports(fit: VarFit, x: np.ndarray, m: int, level: float = constants.NOMINAL_LEVEL) -> List[TestReport]:
        """Naive, corrected and modified statistics of an OLS fit."""
        d, p = fit.d, fit.p
        panel = DiagnosticsService.panel_for_fit(fit, m)
        lambdas = EstimationService.lambda_set(fit, x)
        comps = DiagnosticsService.diag_components(fit, lambdas, m)
        cov = DiagnosticsService.residual_cov(fit, comps, lambdas, m)
        reports = []

        def naive(name: str, ljung_box: bool):
            def build():
                stat, check = PortmanteauService.checked_statistic(panel, m, ljung_box, normalize=True)
                return PortmanteauService.naive_report(name, m, stat, d, p, notes=check)
            return build

        def corrected(name: str, ljung_box: bool):
            def build():
                stat, check = PortmanteauService.checked_statistic(panel, m, ljung_box, normalize=True)
                law = PortmanteauService.weights_ols(cov, lambdas.sigma_G_hat)
                return PortmanteauService.weighted_report(name, m, stat, law, cov.notes + check)
            return build

        def modified(name: str, ljung_box: bool):
            return lambda: PortmanteauService.modified_ols(panel, comps, name=name, ljung_box=ljung_box)

        reports.append(PortmanteauService._guarded(constants.NAIVE_LB, m, "chisq-naive", naive(constants.NAIVE_LB, True)))
        reports.append(PortmanteauService._guarded(constants.NAIVE_BP, m, "chisq-naive", naive(constants.NAIVE_BP, False)))
        reports.append(PortmanteauService._guarded(constants.LB_OLS, m, "weighted-chisq", corrected(constants.LB_OLS, True)))
        reports.append(PortmanteauService._guarded(constants.BP_OLS, m, "weighted-chisq", corrected(constants.BP_OLS, False)))
        reports.append(PortmanteauService._guarded(constants.MOD_OLS, m, "chisq", modified(constants.MOD_OLS, True)))
        reports.append(PortmanteauService._guarded(constants.MOD_BP_OLS, m, "chisq", modified(constants.MOD_BP_OLS, False)))
        for r in reports:
            r.level = level
        return reports

    @staticmethod
    def weighted_reports(fit: VarFit, x: np.ndarray, m: int, level: float = constants.NOMINAL_LEVEL) -> List[TestReport]:
        """a/b statistics and both modified statistics of a GLS or ALS fit."""
        if not fit.is_weighted:
            raise ValueError("Weighted reports need a GLS or ALS fit")
        tag = fit.method
        panel = DiagnosticsService.panel_for_fit(fit, m)
        lambdas = EstimationService.lambda_set(fit, x)
        comps = DiagnosticsService.diag_components(fit, lambdas, m)
        reports = []
        try:
            cov = DiagnosticsService.residual_cov(fit, comps, lambdas, m, range_tol=None)
            law = PortmanteauService.weights_als(cov, range_tol=None)
        except VarCheckError as e:
            cov, law = None, None
            failure = f"{type(e).__name__}: {e}"
            logger.warning(f"{tag} weights unavailable (m={m}): {e}")

        for kind, ljung_box in (("LB", True), ("BP", False)):
            for variant in ("a", "b"):
                name = f"{kind}-{tag}-{variant}"
                if law is None:
                    reports.append(TestReport(name=name, m=m, law="weighted-chisq", feasible=False, notes=[failure]))
                    continue
                reports.append(PortmanteauService._guarded(
                    name, m, "weighted-chisq",
                    lambda lb=ljung_box, v=variant, n=name: PortmanteauService._weighted_from_panel(
                        n, panel, m, lb, v, law, cov.notes
                    ),
                ))
        modified_names = (
            (constants.MOD_GLS, True), (constants.MOD_BP_GLS, False),
        ) if tag == "GLS" else (
            (constants.MOD_ALS, True), (constants.MOD_BP_ALS, False),
        )
        for mod_name, ljung_box in modified_names:
            reports.append(PortmanteauService._guarded(
                mod_name, m, "chisq",
                lambda n=mod_name, lb=ljung_box: PortmanteauService.modified_als(panel, comps, name=n, ljung_box=lb),
            ))
        for r in reports:
            r.level = level
        return reports

    @staticmethod
    def run_all(
        fit: VarFit,
        x: np.ndarray,
        m: int,
        level: float = constants.NOMINAL_LEVEL,
        ols_fit: Optional[VarFit] = None,
    ) -> List[TestReport]:
        """
        Every applicable report for one lag count. A GLS/ALS fit also gets the OLS
        family, from `ols_fit` or a fresh OLS fit of the same order.
        """
        if fit.method == "OLS":
            return PortmanteauService.ols_reports(fit, x, m, level)
        ols = ols_fit if ols_fit is not None else EstimationService.fit_ols(x, fit.p)
        return PortmanteauService.ols_reports(ols, x, m, level) + PortmanteauService.weighted_reports(fit, x, m, level)

    @staticmethod
    def run_lags(fit: VarFit, x: np.ndarray, m_list: Iterable[int], level: float = constants.NOMINAL_LEVEL) -> List[TestReport]:
        ols = EstimationService.fit_ols(x, fit.p) if fit.method != "OLS" else fit
        reports = []
        for m in m_list:
            reports.extend(PortmanteauService.run_all(fit, x, m, level, ols_fit=ols))
        return reports

    @staticmethod
    def reports_frame(reports: List[TestReport], value: str = "p_value") -> pd.DataFrame:
        """Rows = statistic names, columns = m; p-values in percent or statistics, 'n.a.' when infeasible."""
        cells: Dict[str, Dict[int, object]] = {}
        for r in reports:
            if value == "p_value":
                cell = r.display_p()
            else:
                cell = "n.a." if not r.feasible or r.statistic is None else f"{r.statistic:.2f}"
            cells.setdefault(r.name, {})[r.m] = cell
        frame = pd.DataFrame.from_dict(cells, orient="index")
        frame = frame.reindex(sorted(frame.columns), axis=1)
        frame.columns = [f"m={c}" for c in frame.columns]
        return frame
