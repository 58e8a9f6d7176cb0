"""
Simulation study harness: empirical size and power tables, weight summaries and the
ALS/GLS equivalence and OLS/GLS efficiency studies.

Replication k draws from the counter-based stream keyed on (seed_root, k), so
tables do not depend on the number of workers or on scheduling.
"""
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import stats

from varcheck import constants
from varcheck.config import Config
from varcheck.exceptions import VarCheckError
from varcheck.models.experiment import ExperimentConfig, RejectionTable, WeightSummary
from varcheck.models.var import SimConfig, VarCoefficients, VolCurve
from varcheck.services.diagnostics import DiagnosticsService
from varcheck.services.estimators import EstimationService
from varcheck.services.matnum import MatrixService
from varcheck.services.portmanteau import PortmanteauService
from varcheck.services.var_model import VarModelService

logger = logging.getLogger(__name__)


def _replicate(cfg: ExperimentConfig, T: int, k: int) -> Dict[Tuple[str, int], Optional[bool]]:
    """Rejection decision per (test, m) for one replication; None marks a failure."""
    coeffs = MonteCarloService.coefficients(cfg)
    vol = MonteCarloService.volatility(cfg)
    rng = VarModelService.make_rng(cfg.seed_root, k)
    outcome: Dict[Tuple[str, int], Optional[bool]] = {(t, m): None for t in cfg.tests for m in cfg.m_list}
    try:
        x = VarModelService.simulate(coeffs, vol, SimConfig(T=T, seed=cfg.seed_root, burn_in=cfg.burn_in), rng=rng)
        p = cfg.fit_order
        ols = EstimationService.fit_ols(x, p)
        wanted = set(cfg.tests)
        als = EstimationService.fit_als(x, p, cfg.kernel) if any("ALS" in t for t in wanted) else None
        gls = None
        if cfg.include_gls and any("GLS" in t for t in wanted):
            gls = EstimationService.fit_gls(x, p, vol)
    except VarCheckError as e:
        logger.warning(f"Replication {k} (T={T}) failed: {e}")
        return outcome

    for m in cfg.m_list:
        reports = []
        try:
            reports.extend(PortmanteauService.ols_reports(ols, x, m, cfg.level))
            if als is not None:
                reports.extend(PortmanteauService.weighted_reports(als, x, m, cfg.level))
            if gls is not None:
                reports.extend(PortmanteauService.weighted_reports(gls, x, m, cfg.level))
        except VarCheckError as e:
            logger.warning(f"Replication {k} (T={T}, m={m}) failed: {e}")
        for r in reports:
            if (r.name, m) in outcome:
                outcome[(r.name, m)] = r.rejected
    return outcome


def _weights(cfg: ExperimentConfig, T: int, m: int, k: int) -> Optional[Dict[str, np.ndarray]]:
    """Ascending estimated weights of the OLS, ALS and GLS laws for one replication."""
    coeffs = MonteCarloService.coefficients(cfg)
    vol = MonteCarloService.volatility(cfg)
    rng = VarModelService.make_rng(cfg.seed_root, k)
    try:
        x = VarModelService.simulate(coeffs, vol, SimConfig(T=T, seed=cfg.seed_root, burn_in=cfg.burn_in), rng=rng)
        p = cfg.fit_order
        out = {}
        ols = EstimationService.fit_ols(x, p)
        lambdas = EstimationService.lambda_set(ols, x)
        comps = DiagnosticsService.diag_components(ols, lambdas, m)
        cov = DiagnosticsService.residual_cov(ols, comps, lambdas, m)
        out["ols"] = np.sort(PortmanteauService.weights_ols(cov, lambdas.sigma_G_hat).weights)
        fits = [("als", EstimationService.fit_als(x, p, cfg.kernel))]
        if cfg.include_gls:
            fits.append(("gls", EstimationService.fit_gls(x, p, vol)))
        for tag, fit in fits:
            lam = EstimationService.lambda_set(fit, x)
            comp = DiagnosticsService.diag_components(fit, lam, m)
            rc = DiagnosticsService.residual_cov(fit, comp, lam, m, range_tol=None)
            out[tag] = np.sort(PortmanteauService.weights_als(rc, range_tol=None).weights)
        return out
    except VarCheckError as e:
        logger.warning(f"Weight replication {k} failed: {e}")
        return None


def _equivalence(cfg: ExperimentConfig, T: int, m: int, k: int) -> Optional[Tuple[float, float]]:
    coeffs = MonteCarloService.coefficients(cfg)
    vol = MonteCarloService.volatility(cfg)
    rng = VarModelService.make_rng(cfg.seed_root, k)
    try:
        x = VarModelService.simulate(coeffs, vol, SimConfig(T=T, seed=cfg.seed_root), rng=rng)
        p = cfg.fit_order
        als = EstimationService.fit_als(x, p, cfg.kernel)
        gls = EstimationService.fit_gls(x, p, vol)
        pa = DiagnosticsService.panel_for_fit(als, m)
        pg = DiagnosticsService.panel_for_fit(gls, m)
        gap = float(np.sqrt(T) * np.linalg.norm(pa.gamma - pg.gamma))
        stat_gap = abs(PortmanteauService.lb_als(pa, m, "b") - PortmanteauService.lb_als(pg, m, "b"))
        return gap, float(stat_gap)
    except VarCheckError as e:
        logger.warning(f"Equivalence replication {k} failed: {e}")
        return None


def _efficiency(cfg: ExperimentConfig, T: int, k: int) -> Optional[bool]:
    coeffs = MonteCarloService.coefficients(cfg)
    vol = MonteCarloService.volatility(cfg)
    rng = VarModelService.make_rng(cfg.seed_root, k)
    try:
        x = VarModelService.simulate(coeffs, vol, SimConfig(T=T, seed=cfg.seed_root), rng=rng)
        p = max(1, cfg.fit_order)
        ols = EstimationService.fit_ols(x, p)
        gls = EstimationService.fit_gls(x, p, vol)
        gap = MatrixService.symmetrize(ols.theta_cov - gls.theta_cov)
        smallest = float(MatrixService.eigvals_sym(gap)[-1])
        return smallest >= -1e-6 * MatrixService.norm_inf(ols.theta_cov)
    except VarCheckError as e:
        logger.warning(f"Efficiency replication {k} failed: {e}")
        return None


class MonteCarloService:
    """Size, power and weight studies."""

    @staticmethod
    def coefficients(cfg: ExperimentConfig) -> VarCoefficients:
        if cfg.dgp == "uncorrelated-power":
            return VarModelService.power_uncorrelated_coefficients()
        return VarModelService.dgp_coefficients(cfg.alternative_a)

    @staticmethod
    def volatility(cfg: ExperimentConfig) -> VolCurve:
        if cfg.vol == "iid":
            return VarModelService.vol_constant(np.eye(2))
        if cfg.vol == "break":
            return VarModelService.vol_break_spec(varpi=cfg.varpi, rho=cfg.rho)
        if cfg.vol == "trend":
            return VarModelService.vol_smooth_trend(varpi=cfg.varpi)
        if cfg.vol == "scalar-trend":
            return VarModelService.vol_scalar_trend()
        return VarModelService.vol_scalar_break()

    @staticmethod
    def binomial_band(N: int, level: float, confidence: float = 0.95) -> Tuple[float, float]:
        """Normal-approximation band for a rejection frequency in percent."""
        z = stats.norm.ppf(0.5 + confidence / 2.0)
        half = z * np.sqrt(level * (1.0 - level) / N)
        return 100.0 * (level - half), 100.0 * (level + half)

    @staticmethod
    def _n_jobs(cfg: ExperimentConfig) -> int:
        return cfg.n_jobs if cfg.n_jobs is not None else Config.N_JOBS

    @staticmethod
    def rejection_table(cfg: ExperimentConfig) -> RejectionTable:
        """Rejection frequencies of cfg.tests on every (T, m) cell."""
        rows, cols = list(cfg.tests), cfg.cells
        rejections = np.zeros((len(rows), len(cols)), dtype=int)
        failures = np.zeros((len(rows), len(cols)), dtype=int)
        n_jobs = MonteCarloService._n_jobs(cfg)

        for T in cfg.T_list:
            logger.info(f"Running {cfg.N} replications: dgp={cfg.dgp}, vol={cfg.vol}, T={T}")
            outcomes = Parallel(n_jobs=n_jobs)(delayed(_replicate)(cfg, T, k) for k in range(cfg.N))
            for outcome in outcomes:
                for (name, m), decision in outcome.items():
                    i, j = rows.index(name), cols.index((T, m))
                    if decision is None:
                        failures[i, j] += 1
                    elif decision:
                        rejections[i, j] += 1

        total_failures = int(failures.sum())
        if total_failures:
            logger.warning(f"{total_failures} (test, replication) pairs failed and count as non-rejections")
        return RejectionTable(
            rows=rows,
            cols=cols,
            frequencies=100.0 * rejections / cfg.N,
            failures=failures,
            N=cfg.N,
            level=cfg.level,
            band=MonteCarloService.binomial_band(cfg.N, cfg.level),
        )

    @staticmethod
    def run_size(cfg: ExperimentConfig) -> RejectionTable:
        if cfg.dgp == "var2-power":
            logger.warning("run_size called with the power DGP; frequencies are rejection rates under the alternative")
        return MonteCarloService.rejection_table(cfg)

    @staticmethod
    def run_power(cfg: ExperimentConfig) -> RejectionTable:
        if cfg.dgp == "var2-size" and cfg.a is None:
            cfg = cfg.model_copy(update={"dgp": "var2-power"})
        return MonteCarloService.rejection_table(cfg)

    @staticmethod
    def run_uncorrelated_power(cfg: Optional[ExperimentConfig] = None, **overrides) -> RejectionTable:
        """Tests of p = 0 against the VAR(1) alternative A_1 = -0.3 I_2 with scalar volatility."""
        base = {
            "dgp": "uncorrelated-power",
            "vol": "scalar-trend",
            "T_list": list(constants.UNCORRELATED_T_LIST),
            "m_list": list(constants.POWER_M_LIST),
            "p_fit": 0,
        }
        base.update(overrides)
        cfg = ExperimentConfig.model_validate({**(cfg or ExperimentConfig()).model_dump(), **base})
        return MonteCarloService.rejection_table(cfg)

    @staticmethod
    def weight_summary(cfg: ExperimentConfig, T: Optional[int] = None, m: Optional[int] = None) -> WeightSummary:
        T = T or cfg.T_list[0]
        m = m or cfg.m_list[0]
        results = Parallel(n_jobs=MonteCarloService._n_jobs(cfg))(
            delayed(_weights)(cfg, T, m, k) for k in range(cfg.N)
        )
        ok = [r for r in results if r is not None]
        if not ok:
            raise VarCheckError("Every weight replication failed")
        means, sds = {}, {}
        for tag in ok[0]:
            arr = np.vstack([r[tag] for r in ok])
            means[tag] = arr.mean(axis=0)
            sds[tag] = arr.std(axis=0, ddof=1) if len(ok) > 1 else np.zeros(arr.shape[1])
        return WeightSummary(T=T, m=m, N=cfg.N, means=means, sds=sds, failures=len(results) - len(ok))

    @staticmethod
    def equivalence_study(cfg: ExperimentConfig, T_list: List[int], reps: int = 50, m: int = 5) -> pd.DataFrame:
        """Medians over replications of sqrt(T) ||gamma_ALS - gamma_GLS|| and |Q_ALS - Q_GLS|."""
        records = []
        for T in T_list:
            results = Parallel(n_jobs=MonteCarloService._n_jobs(cfg))(
                delayed(_equivalence)(cfg, T, m, k) for k in range(reps)
            )
            ok = np.array([r for r in results if r is not None])
            records.append({
                "T": T,
                "median_gamma_gap": float(np.median(ok[:, 0])) if ok.size else np.nan,
                "median_stat_gap": float(np.median(ok[:, 1])) if ok.size else np.nan,
                "failures": reps - len(ok),
            })
        return pd.DataFrame.from_records(records)

    @staticmethod
    def efficiency_study(cfg: ExperimentConfig, T: int, reps: int = 200) -> Dict[str, float]:
        """Share of replications where the OLS minus GLS asymptotic covariance is PSD."""
        results = Parallel(n_jobs=MonteCarloService._n_jobs(cfg))(
            delayed(_efficiency)(cfg, T, k) for k in range(reps)
        )
        ok = [r for r in results if r is not None]
        share = float(np.mean(ok)) if ok else float('nan')
        return {"T": T, "reps": reps, "share_psd": share, "failures": reps - len(ok)}
