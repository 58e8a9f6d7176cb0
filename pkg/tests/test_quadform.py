import numpy as np
import pytest
from scipy import stats

from varcheck.exceptions import ConvergenceFailure
from varcheck.models.report import WeightedChiSq
from varcheck.services.quadform import QuadFormService


@pytest.mark.parametrize("k", [1, 4, 16, 60])
def test_equal_weights_match_chisq(k):
    law = WeightedChiSq.chisq(k)
    for q in (0.5, 0.9, 0.95, 0.99):
        x = stats.chi2.ppf(q, k)
        assert QuadFormService.upper_tail(law, x) == pytest.approx(1.0 - q, abs=1e-6)


def test_chisq1_critical_value():
    assert QuadFormService.p_value([1.0], 3.8415) == pytest.approx(0.05, abs=1e-4)


def test_scaling_of_weights():
    w = np.array([3.0, 1.0, 0.25])
    for x in (0.5, 2.0, 7.5):
        assert QuadFormService.p_value(2.0 * w, 2.0 * x) == pytest.approx(QuadFormService.p_value(w, x), abs=1e-7)


def test_zero_weights_put_mass_at_zero():
    assert QuadFormService.p_value(np.zeros(5), 1.0) == 0.0
    assert QuadFormService.quantile(WeightedChiSq(weights=np.zeros(3)), 0.05) == 0.0


def test_nonpositive_argument_gives_one():
    assert QuadFormService.p_value([1.0, 2.0], 0.0) == 1.0
    assert QuadFormService.p_value([1.0, 2.0], -3.0) == 1.0


def test_tail_is_decreasing():
    law = WeightedChiSq(weights=[5.0, 2.0, 1.0, 0.1])
    tails = [QuadFormService.upper_tail(law, x) for x in np.linspace(0.1, 60.0, 25)]
    assert all(b <= a + 1e-9 for a, b in zip(tails, tails[1:]))
    assert tails[-1] < 1e-3


def test_negligible_weights_are_dropped():
    assert QuadFormService.p_value([1.0, 1e-30], 2.0) == pytest.approx(stats.chi2.sf(2.0, 1), abs=1e-7)


def test_weights_are_validated():
    with pytest.raises(ValueError):
        WeightedChiSq(weights=[1.0, -0.5])
    with pytest.raises(ValueError):
        WeightedChiSq(weights=[1.0, np.nan])
    assert list(WeightedChiSq(weights=[1.0, 3.0, 2.0]).weights) == [3.0, 2.0, 1.0]


def test_unequal_weights_against_simulation(rng):
    w = np.array([4.0, 1.0, 1.0, 0.3])
    draws = (rng.standard_normal((200000, w.size)) ** 2) @ w
    for x in (2.0, 6.0, 15.0):
        assert QuadFormService.p_value(w, x) == pytest.approx(np.mean(draws > x), abs=5e-3)


def test_quantile():
    assert QuadFormService.quantile(WeightedChiSq.chisq(4), 0.05) == pytest.approx(9.4877, abs=1e-3)
    w = WeightedChiSq(weights=[2.0, 0.5])
    w_scaled = WeightedChiSq(weights=[6.0, 1.5])
    assert QuadFormService.quantile(w_scaled, 0.1) == pytest.approx(3.0 * QuadFormService.quantile(w, 0.1), rel=1e-6)
    with pytest.raises(ValueError):
        QuadFormService.quantile(w, 1.0)


def test_mean():
    assert QuadFormService.mean(WeightedChiSq.chisq(4)) == pytest.approx(4.0, abs=1e-4)
    law = WeightedChiSq(weights=[3.0, 1.0, 0.5])
    assert QuadFormService.mean(law) == pytest.approx(4.5, rel=1e-3)


def test_non_convergence_is_reported(mocker):
    mocker.patch.object(QuadFormService, "_quad", return_value=(0.0, 1.0))
    with pytest.raises(ConvergenceFailure):
        QuadFormService.upper_tail(WeightedChiSq.chisq(2), 1.0)


def test_chisq_sf():
    assert QuadFormService.chisq_sf(9.4877, 4) == pytest.approx(0.05, abs=1e-5)
