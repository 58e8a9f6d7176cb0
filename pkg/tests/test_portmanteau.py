import numpy as np
import pytest

from varcheck import constants
from varcheck.config import Config
from varcheck.exceptions import SingularMatrix
from varcheck.models.oracles import TwoRegimeSpec
from varcheck.models.var import SimConfig, VarCoefficients
from varcheck.services.diagnostics import DiagnosticsService
from varcheck.services.estimators import EstimationService
from varcheck.services.portmanteau import PortmanteauService
from varcheck.services.theory_oracles import TheoryOracleService
from varcheck.services.var_model import VarModelService


def components(fit, x, m):
    lambdas = EstimationService.lambda_set(fit, x)
    return lambdas, DiagnosticsService.diag_components(fit, lambdas, m)


def test_zero_panel_variant_b_is_zero():
    panel = DiagnosticsService.autocov_panel(np.zeros((30, 2)), 4, "ALS")
    assert PortmanteauService.bp_als(panel, 4, "b") == 0.0
    assert PortmanteauService.lb_als(panel, 4, "b") == 0.0


def test_univariate_ljung_box(rng):
    T = 120
    r = rng.standard_normal(T)
    panel = DiagnosticsService.autocov_panel(r, 1)
    rho = (r[1:] @ r[:-1]) / (r @ r)
    assert PortmanteauService.lb_ols(panel, 1) == pytest.approx(T * T / (T - 1) * rho ** 2, rel=1e-10)
    assert PortmanteauService.bp_ols(panel, 1) == pytest.approx(T * rho ** 2, rel=1e-10)


def test_trace_and_kron_forms_agree(rng):
    panel = DiagnosticsService.autocov_panel(rng.standard_normal((80, 3)), 6)
    for ljung_box in (False, True):
        for normalize in (False, True):
            trace = PortmanteauService.trace_statistic(panel, 6, ljung_box, normalize)
            kron = PortmanteauService.kron_statistic(panel, 6, ljung_box, normalize)
            assert trace == pytest.approx(kron, rel=1e-10)


def test_box_pierce_below_ljung_box(rng):
    panel = DiagnosticsService.autocov_panel(rng.standard_normal((60, 2)), 5)
    for m in range(1, 6):
        assert PortmanteauService.bp_ols(panel, m) <= PortmanteauService.lb_ols(panel, m)


def test_statistic_needs_enough_lags(rng):
    panel = DiagnosticsService.autocov_panel(rng.standard_normal((60, 2)), 3)
    with pytest.raises(ValueError):
        PortmanteauService.trace_statistic(panel, 4, ljung_box=True)


def test_homoscedastic_weights_are_near_one(rng):
    x = rng.standard_normal((5000, 2))
    fit = EstimationService.fit_ols(x, 0)
    lambdas, comps = components(fit, x, 3)
    cov = DiagnosticsService.residual_cov(fit, comps, lambdas, 3)
    law = PortmanteauService.weights_ols(cov, lambdas.sigma_G_hat)
    np.testing.assert_allclose(law.weights, 1.0, atol=0.15)


def test_example2_delta_estimate():
    spec = TwoRegimeSpec(s10=1.0, s11=0.5, s20=1.0, s21=1.0, tau1=0.5, tau2=0.5)
    vol = VarModelService.vol_break_2d(spec.s10, spec.s11, spec.s20, spec.s21, spec.tau1, spec.tau2)
    oracle = TheoryOracleService.example2_delta(spec, 2)
    assert oracle[4, 4] == pytest.approx(1.1111, abs=1e-4)
    estimates = []
    for seed in range(5):
        x = VarModelService.simulate(VarCoefficients(d=2, p=0), vol, SimConfig(T=10000, seed=seed))
        fit = EstimationService.fit_ols(x, 1)
        lambdas, comps = components(fit, x, 2)
        cov = DiagnosticsService.residual_cov(fit, comps, lambdas, 2)
        estimates.append(PortmanteauService.delta_ols(cov, lambdas.sigma_G_hat))
    np.testing.assert_allclose(np.median(estimates, axis=0), oracle, atol=0.05)


def test_modified_statistics_without_estimation_effect(null_panel):
    m = 4
    fit = EstimationService.fit_gls(null_panel, 0, VarModelService.vol_constant(np.eye(2)))
    _, comps = components(fit, null_panel, m)
    panel = DiagnosticsService.panel_for_fit(fit, m)
    gamma = panel.gamma[:4 * m]

    report = PortmanteauService.modified_als(panel, comps)
    assert report.name == constants.MOD_BP_ALS
    assert report.df == 4 * m
    assert report.feasible
    assert report.statistic == pytest.approx(panel.T * gamma @ gamma, rel=1e-10)
    assert report.statistic == pytest.approx(PortmanteauService.bp_als(panel, m, "b"), rel=1e-10)

    weighted = PortmanteauService.modified_als(panel, comps, ljung_box=True)
    assert weighted.name == constants.MOD_ALS
    assert weighted.statistic == pytest.approx(PortmanteauService.lb_als(panel, m, "b"), rel=1e-10)
    assert weighted.statistic > report.statistic

    ols = EstimationService.fit_ols(null_panel, 0)
    _, comps = components(ols, null_panel, m)
    report = PortmanteauService.modified_ols(DiagnosticsService.panel_for_fit(ols, m), comps)
    assert report.df == 4 * m
    assert 0.0 <= report.p_value <= 1.0


def test_modified_ols_with_identity_lambda_is_box_pierce(null_panel):
    m = 3
    fit = EstimationService.fit_ols(null_panel, 0)
    _, comps = components(fit, null_panel, m)
    comps = comps.model_copy(update={"lambda_u_u": np.eye(4 * m)})
    panel = DiagnosticsService.panel_for_fit(fit, m)
    gamma = panel.gamma[:4 * m]
    report = PortmanteauService.modified_ols(panel, comps)
    assert report.name == constants.MOD_BP_OLS
    assert report.statistic == pytest.approx(panel.T * gamma @ gamma, rel=1e-10)

    lb = PortmanteauService.modified_ols(panel, comps, ljung_box=True)
    scale = np.repeat(panel.T / (panel.T - np.arange(1, m + 1)), 4)
    assert lb.statistic == pytest.approx(panel.T * np.sum(scale * gamma ** 2), rel=1e-10)


def test_projector_annihilates_phi(rng):
    for rows, cols in ((12, 4), (20, 8)):
        phi = rng.standard_normal((rows, cols))
        a = rng.standard_normal((rows, rows))
        lam = a @ a.T + rows * np.eye(rows)
        proj = PortmanteauService.projector_ols(phi, lam)
        assert np.abs((np.eye(rows) - proj) @ phi).max() < 1e-10
        np.testing.assert_allclose(proj @ proj, proj, atol=1e-10)


def test_projector_rejects_rank_deficient_phi(rng):
    phi = rng.standard_normal((12, 4))
    phi[:, 3] = phi[:, 0]
    with pytest.raises(SingularMatrix):
        PortmanteauService.projector_ols(phi, np.eye(12))


def test_modified_statistic_df_with_lags(null_panel):
    fit = EstimationService.fit_ols(null_panel, 1)
    _, comps = components(fit, null_panel, 5)
    report = PortmanteauService.modified_ols(DiagnosticsService.panel_for_fit(fit, 5), comps)
    assert report.df == 16
    assert report.law == "chisq"


def test_modified_statistic_infeasible_when_m_not_above_p(null_panel):
    fit = EstimationService.fit_ols(null_panel, 2)
    _, comps = components(fit, null_panel, 2)
    report = PortmanteauService.modified_ols(DiagnosticsService.panel_for_fit(fit, 2), comps)
    assert not report.feasible
    assert report.rejected is None
    assert report.display_p() == "n.a."


def test_modified_condition_gate(mocker, null_panel):
    mocker.patch.object(Config, "MODIFIED_COND_LIMIT", 0.5)
    fit = EstimationService.fit_ols(null_panel, 1)
    _, comps = components(fit, null_panel, 3)
    report = PortmanteauService.modified_ols(DiagnosticsService.panel_for_fit(fit, 3), comps)
    assert not report.feasible
    assert "not invertible" in report.notes[0]

    reports = {r.name: r for r in PortmanteauService.run_all(fit, null_panel, 3)}
    assert not reports[constants.MOD_OLS].feasible
    assert not reports[constants.MOD_BP_OLS].feasible
    assert reports[constants.LB_OLS].feasible
    assert reports[constants.NAIVE_LB].feasible


def test_gamma0_condition_gate(mocker, null_panel):
    mocker.patch.object(Config, "GAMMA0_COND_LIMIT", 0.5)
    fit = EstimationService.fit_ols(null_panel, 1)
    reports = {r.name: r for r in PortmanteauService.run_all(fit, null_panel, 3)}
    for name in (constants.NAIVE_LB, constants.NAIVE_BP, constants.LB_OLS, constants.BP_OLS):
        assert not reports[name].feasible
        assert reports[name].notes[0].startswith("SingularGamma0")
    assert reports[constants.MOD_OLS].feasible
    assert reports[constants.MOD_BP_OLS].feasible


def test_form_disagreement_is_noted(mocker, null_panel):
    mocker.patch.object(PortmanteauService, "kron_statistic", return_value=-1.0)
    fit = EstimationService.fit_ols(null_panel, 1)
    reports = {r.name: r for r in PortmanteauService.run_all(fit, null_panel, 3)}
    for name in (constants.NAIVE_LB, constants.LB_OLS, constants.BP_OLS):
        assert reports[name].feasible
        assert any("forms disagree" in note for note in reports[name].notes)
    assert not any("forms disagree" in note for note in reports[constants.MOD_OLS].notes)
    stat, notes = PortmanteauService.checked_statistic(DiagnosticsService.panel_for_fit(fit, 3), 3, True, True)
    assert stat > 0
    assert len(notes) == 1


def test_naive_df_clamped():
    report = PortmanteauService.naive_report(constants.NAIVE_LB, 1, 3.0, 2, 1)
    assert report.df == 1
    assert report.notes == ["degrees of freedom clamped to 1"]


def test_run_all_names(null_panel, fast_kernel):
    ols = EstimationService.fit_ols(null_panel, 1)
    names = [r.name for r in PortmanteauService.run_all(ols, null_panel, 5)]
    assert names == [
        constants.NAIVE_LB, constants.NAIVE_BP, constants.LB_OLS, constants.BP_OLS, constants.MOD_OLS, constants.MOD_BP_OLS,
    ]

    als = EstimationService.fit_als(null_panel, 1, fast_kernel)
    reports = PortmanteauService.run_all(als, null_panel, 5, ols_fit=ols)
    assert [r.name for r in reports][6:] == [
        constants.LB_ALS_A, constants.LB_ALS_B, constants.BP_ALS_A, constants.BP_ALS_B,
        constants.MOD_ALS, constants.MOD_BP_ALS,
    ]
    for r in reports:
        assert r.feasible
        assert 0.0 <= r.p_value <= 1.0


def test_gls_reports_use_gls_names(null_panel):
    fit = EstimationService.fit_gls(null_panel, 1, VarModelService.vol_constant(np.eye(2)))
    names = [r.name for r in PortmanteauService.weighted_reports(fit, null_panel, 5)]
    assert names == [
        constants.LB_GLS_A, constants.LB_GLS_B, constants.BP_GLS_A, constants.BP_GLS_B,
        constants.MOD_GLS, constants.MOD_BP_GLS,
    ]
    with pytest.raises(ValueError):
        PortmanteauService.weighted_reports(EstimationService.fit_ols(null_panel, 1), null_panel, 5)


def test_reports_frame(null_panel):
    fit = EstimationService.fit_ols(null_panel, 1)
    reports = PortmanteauService.run_lags(fit, null_panel, [10, 5])
    frame = PortmanteauService.reports_frame(reports)
    assert list(frame.columns) == ["m=5", "m=10"]
    assert constants.LB_OLS in frame.index
    stats_frame = PortmanteauService.reports_frame(reports, value="statistic")
    assert float(stats_frame.loc[constants.LB_OLS, "m=5"]) > 0

    reports[0].feasible = False
    assert PortmanteauService.reports_frame(reports).iloc[0, 1] == "n.a."


def test_report_level_and_rejection(null_panel):
    fit = EstimationService.fit_ols(null_panel, 1)
    reports = PortmanteauService.ols_reports(fit, null_panel, 5, level=0.1)
    for r in reports:
        assert r.level == 0.1
        assert r.rejected == (r.p_value < 0.1)
        assert r.to_dict()["name"] == r.name


def test_detects_serial_correlation(rng):
    coeffs = VarCoefficients(d=2, p=2, mats=[np.zeros((2, 2)), 0.5 * np.eye(2)])
    x = VarModelService.simulate(coeffs, VarModelService.vol_constant(np.eye(2)), SimConfig(T=500, seed=9))
    fit = EstimationService.fit_ols(x, 1)
    reports = {r.name: r for r in PortmanteauService.ols_reports(fit, x, 5)}
    assert reports[constants.LB_OLS].p_value < 0.01
    assert reports[constants.MOD_OLS].p_value < 0.01
