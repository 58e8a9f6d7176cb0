"""
Tail probabilities of Q = sum_i delta_i U_i^2, U_i iid N(0, 1), by Imhof's inversion

    P(Q > x) = 1/2 + (1/pi) int_0^inf sin(theta(u)) / (u rho(u)) du,
    theta(u) = 1/2 sum_i arctan(delta_i u) - x u / 2,
    rho(u)   = prod_i (1 + delta_i^2 u^2)^(1/4).

The integral is truncated at Imhof's analytic bound when that point is reachable
within a moderate number of oscillations; otherwise the remainder [A, inf) is
integrated with Fourier weights after writing sin(theta) = sin(a) cos(wu) - cos(a) sin(wu).
"""
import logging
import warnings
from typing import Optional

import numpy as np
from scipy import integrate, optimize, stats

from varcheck.config import Config
from varcheck.exceptions import ConvergenceFailure
from varcheck.models.report import WeightedChiSq

logger = logging.getLogger(__name__)

# Oscillations allowed on the finite head before switching to a Fourier tail
MAX_HEAD_PERIODS = 50
MEAN_NODES = 32


class QuadFormService:
    """Distribution of nonnegative weighted sums of chi-square(1) variables."""

    @staticmethod
    def law(weights) -> WeightedChiSq:
        return WeightedChiSq(weights=weights)

    @staticmethod
    def _log_rho(delta: np.ndarray, u: float) -> float:
        return 0.25 * float(np.sum(np.log1p((delta * u) ** 2)))

    @staticmethod
    def _half_angle(delta: np.ndarray, u: float) -> float:
        return 0.5 * float(np.sum(np.arctan(delta * u)))

    @staticmethod
    def _truncation_point(delta: np.ndarray, tol: float) -> float:
        """U with |int_U^inf| <= tol: 2 / (pi n U^{n/2} prod sqrt(delta)) = tol."""
        n = delta.size
        log_u = (2.0 / n) * (np.log(2.0 / (np.pi * n * tol)) - 0.5 * np.sum(np.log(delta)))
        return float(np.exp(min(log_u, 700.0)))

    @staticmethod
    def _quad(func, a, b, tol, limit, **kwargs):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            value, err = integrate.quad(func, a, b, epsabs=tol, epsrel=0.0, limit=limit, **kwargs)
        return value, err

    @staticmethod
    def upper_tail(w: WeightedChiSq, x: float, tol: Optional[float] = None, limit: Optional[int] = None) -> float:
        """P(Q > x). All-zero weights put the mass at 0, giving 0 for every x >= 0."""
        tol = tol or w.tolerance
        limit = limit or Config.IMHOF_LIMIT
        delta = w.effective_weights
        if delta.size == 0:
            return 0.0
        if x <= 0.0:
            return 1.0

        omega = 0.5 * x

        def integrand(u: float) -> float:
            if u == 0.0:
                return 0.5 * (float(np.sum(delta)) - x)
            theta = QuadFormService._half_angle(delta, u) - omega * u
            return np.sin(theta) * np.exp(-QuadFormService._log_rho(delta, u)) / u

        u_trunc = QuadFormService._truncation_point(delta, tol / 2.0)
        head_end = min(u_trunc, MAX_HEAD_PERIODS * 2.0 * np.pi / omega)
        value, err = QuadFormService._quad(integrand, 0.0, head_end, tol / 4.0, limit)

        if head_end < u_trunc:
            def envelope_sin(u: float) -> float:
                return np.sin(QuadFormService._half_angle(delta, u)) * np.exp(-QuadFormService._log_rho(delta, u)) / u

            def envelope_cos(u: float) -> float:
                return np.cos(QuadFormService._half_angle(delta, u)) * np.exp(-QuadFormService._log_rho(delta, u)) / u

            tail_cos, err_cos = QuadFormService._quad(
                envelope_sin, head_end, np.inf, tol / 4.0, limit, weight='cos', wvar=omega
            )
            tail_sin, err_sin = QuadFormService._quad(
                envelope_cos, head_end, np.inf, tol / 4.0, limit, weight='sin', wvar=omega
            )
            value += tail_cos - tail_sin
            err += err_cos + err_sin

        if not np.isfinite(value) or err > max(1e3 * tol, 1e-6):
            raise ConvergenceFailure(
                f"Imhof integral did not converge at x={x:.6g} (n={delta.size}, error estimate {err:.3e})"
            )
        return float(min(1.0, max(0.0, 0.5 + value / np.pi)))

    @staticmethod
    def p_value(weights, statistic: float) -> float:
        return QuadFormService.upper_tail(WeightedChiSq(weights=weights), statistic)

    @staticmethod
    def chisq_sf(x: float, df: int) -> float:
        """Chi-square(df) survival function."""
        return float(stats.chi2.sf(x, df))

    @staticmethod
    def quantile(w: WeightedChiSq, prob: float) -> float:
        """x with P(Q > x) = prob, by bracketed root search."""
        if not 0.0 < prob < 1.0:
            raise ValueError(f"prob must lie in (0, 1), got {prob}")
        delta = w.effective_weights
        if delta.size == 0:
            return 0.0

        def excess(x: float) -> float:
            return QuadFormService.upper_tail(w, x) - prob

        hi = float(np.sum(delta) + 10.0 * np.sqrt(2.0 * np.sum(delta ** 2)))
        for _ in range(60):
            if excess(hi) < 0.0:
                break
            hi *= 2.0
        else:
            raise ConvergenceFailure(f"Could not bracket the {prob} upper quantile")
        try:
            return float(optimize.brentq(excess, 0.0, hi, xtol=1e-12, rtol=1e-12, maxiter=200))
        except (RuntimeError, ValueError) as e:
            raise ConvergenceFailure(f"Quantile search failed: {e}") from e

    @staticmethod
    def mean(w: WeightedChiSq, nodes: int = MEAN_NODES) -> float:
        """E[Q] = int_0^inf P(Q > x) dx by Gauss-Laguerre quadrature (a sanity check on upper_tail)."""
        delta = w.effective_weights
        if delta.size == 0:
            return 0.0
        scale = 2.0 * float(delta[0])
        y, wts = np.polynomial.laguerre.laggauss(nodes)
        tails = np.array([QuadFormService.upper_tail(w, scale * yi) for yi in y])
        return float(scale * np.sum(wts * np.exp(y) * tails))
