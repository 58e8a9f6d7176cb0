"""
Kernel estimation of the time-varying innovation covariance from residuals.

Sigma0_t has entries sum_i w_ti(b_kl) u_k,i u_l,i with leave-one-out weights
w_ti proportional to K((t - i) / (T b)), w_tt = 0. The estimate is regularized as
Sigma_t = ((Sigma0_t)^2 + nu I)^{1/2} and bandwidths are chosen by minimizing
sum_t ||Sigma_t - u_t u_t'||_F^2 over a log-spaced grid.
"""
import logging
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy.signal import fftconvolve

from varcheck.exceptions import DegenerateKernel, EmptyGrid
from varcheck.models.kernel import KernelConfig, VolPathEstimate
from varcheck.services.matnum import MatrixService

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-10
# Above this length the smoother switches from a dense T x T weight matrix to FFT convolution
DIRECT_LIMIT = 1024

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _gaussian(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x * x) / _SQRT_2PI


def _triangular(x: np.ndarray) -> np.ndarray:
    return np.clip(1.0 - np.abs(x), 0.0, None)


def _epanechnikov(x: np.ndarray) -> np.ndarray:
    return 0.75 * np.clip(1.0 - x * x, 0.0, None)


KERNELS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "gaussian": _gaussian,
    "triangular": _triangular,
    "epanechnikov": _epanechnikov,
}


class VolKernelService:
    """Nonparametric volatility path estimation."""

    @staticmethod
    def kernel_function(name: str) -> Callable[[np.ndarray], np.ndarray]:
        try:
            return KERNELS[name]
        except KeyError:
            raise ValueError(f"Unknown kernel '{name}'. Available: {sorted(KERNELS)}")

    @staticmethod
    def kernel_weights(t: int, T: int, b: float, kernel: str = "gaussian") -> np.ndarray:
        """Leave-one-out weights (w_t1 ... w_tT) for 1-based t."""
        if not 1 <= t <= T:
            raise ValueError(f"t={t} outside 1..{T}")
        if b <= 0:
            raise ValueError(f"Bandwidth must be positive, got {b}")
        k = VolKernelService.kernel_function(kernel)
        i = np.arange(1, T + 1)
        raw = k((t - i) / (T * b))
        raw[t - 1] = 0.0
        total = raw.sum()
        if total <= DEGENERATE_TOL:
            raise DegenerateKernel(f"All kernel weights vanish at t={t} (T={T}, b={b:.3e})")
        return raw / total

    @staticmethod
    def _smooth_columns(y: np.ndarray, b: float, kernel: str) -> np.ndarray:
        """Leave-one-out kernel means of every column of y (T x k) at bandwidth b."""
        T = y.shape[0]
        k = VolKernelService.kernel_function(kernel)
        k0 = float(k(np.zeros(1))[0])
        if T <= DIRECT_LIMIT:
            lags = np.arange(T)[:, None] - np.arange(T)[None, :]
            weights = k(lags / (T * b))
            np.fill_diagonal(weights, 0.0)
            den = weights.sum(axis=1)
            num = weights @ y
        else:
            kvec = k(np.arange(-(T - 1), T) / (T * b))
            den = fftconvolve(np.ones(T), kvec, mode='full')[T - 1:2 * T - 1] - k0
            num = np.column_stack([
                fftconvolve(y[:, c], kvec, mode='full')[T - 1:2 * T - 1] - k0 * y[:, c]
                for c in range(y.shape[1])
            ])
        if np.any(den <= DEGENERATE_TOL):
            t = int(np.argmin(den)) + 1
            raise DegenerateKernel(f"All kernel weights vanish at t={t} (T={T}, b={b:.3e})")
        return num / den[:, None]

    @staticmethod
    def _cell_products(residuals: np.ndarray) -> Tuple[np.ndarray, list]:
        """Columns u_k u_l for the cells k <= l, with their (k, l) labels."""
        d = residuals.shape[1]
        cells = [(k, l) for k in range(d) for l in range(k, d)]
        prods = np.column_stack([residuals[:, k] * residuals[:, l] for k, l in cells])
        return prods, cells

    @staticmethod
    def _assemble(cols: np.ndarray, cells: list, d: int) -> np.ndarray:
        out = np.empty((cols.shape[0], d, d))
        for c, (k, l) in enumerate(cells):
            out[:, k, l] = cols[:, c]
            out[:, l, k] = cols[:, c]
        return out

    @staticmethod
    def _bandwidth_matrix(bandwidths: Union[float, np.ndarray], d: int) -> np.ndarray:
        b = np.asarray(bandwidths, dtype=float)
        if b.ndim == 0:
            return np.full((d, d), float(b))
        if b.shape != (d, d):
            raise ValueError(f"Bandwidth matrix has shape {b.shape}, expected ({d}, {d})")
        return 0.5 * (b + b.T)

    @staticmethod
    def smooth_residual_covariance(
        residuals: np.ndarray,
        cfg: KernelConfig,
        bandwidths: Union[float, np.ndarray],
    ) -> np.ndarray:
        """Unregularized path Sigma0_t, shape (T, d, d)."""
        residuals = np.asarray(residuals, dtype=float)
        if residuals.ndim == 1:
            residuals = residuals[:, None]
        if residuals.shape[0] == 0:
            raise ValueError("Residual panel is empty")
        T, d = residuals.shape
        bmat = VolKernelService._bandwidth_matrix(bandwidths, d)
        prods, cells = VolKernelService._cell_products(residuals)

        smoothed = np.empty_like(prods)
        cell_b = np.array([bmat[k, l] for k, l in cells])
        for b in np.unique(cell_b):
            idx = np.flatnonzero(cell_b == b)
            smoothed[:, idx] = VolKernelService._smooth_columns(prods[:, idx], b, cfg.kernel)
        return VolKernelService._assemble(smoothed, cells, d)

    @staticmethod
    def regularize(sigma0: np.ndarray, nu: float) -> np.ndarray:
        """((Sigma0)^2 + nu I)^{1/2} for a single matrix or a stack."""
        sigma0 = np.asarray(sigma0, dtype=float)
        if nu < 0:
            raise ValueError(f"nu must be nonnegative, got {nu}")
        single = sigma0.ndim == 2
        stack = sigma0[None] if single else sigma0
        out = MatrixService.spectral_apply_batch(stack, lambda w: np.sqrt(w * w + nu))
        return out[0] if single else out

    @staticmethod
    def cv_criterion(residuals: np.ndarray, sigma: np.ndarray) -> float:
        """sum_t ||Sigma_t - u_t u_t'||_F^2."""
        outer = np.einsum('ti,tj->tij', residuals, residuals)
        return float(np.sum((sigma - outer) ** 2))

    @staticmethod
    def _score(residuals: np.ndarray, cfg: KernelConfig, bandwidths, nu: float) -> float:
        sigma0 = VolKernelService.smooth_residual_covariance(residuals, cfg, bandwidths)
        return VolKernelService.cv_criterion(residuals, VolKernelService.regularize(sigma0, nu))

    @staticmethod
    def cross_validate(
        residuals: np.ndarray,
        cfg: KernelConfig,
        grid: Optional[np.ndarray] = None,
    ) -> Tuple[np.ndarray, float, np.ndarray, np.ndarray]:
        """
        Grid-search the bandwidths.

        Returns (d x d bandwidth matrix, attained criterion, grid, single-bandwidth
        criterion on the grid). Per-cell mode starts from the single-bandwidth optimum
        and runs `cfg.sweeps` coordinate-descent sweeps over the cells.
        """
        residuals = np.asarray(residuals, dtype=float)
        if residuals.ndim == 1:
            residuals = residuals[:, None]
        T, d = residuals.shape
        grid = cfg.bandwidth_grid(T) if grid is None else np.asarray(grid, dtype=float).ravel()
        if grid.size == 0:
            raise EmptyGrid("Bandwidth grid is empty")
        nu = cfg.nu_for(T)

        scores = np.array([VolKernelService._score(residuals, cfg, b, nu) for b in grid])
        best = int(np.argmin(scores))
        bmat = np.full((d, d), grid[best])
        score = float(scores[best])
        logger.debug(f"Single-bandwidth CV: b={grid[best]:.4e}, score={score:.6e}")

        if cfg.bandwidth_mode == "per-cell" and d > 1:
            cells = [(k, l) for k in range(d) for l in range(k, d)]
            for sweep in range(cfg.sweeps):
                changed = False
                for k, l in cells:
                    current = bmat[k, l]
                    for b in grid:
                        if b == current:
                            continue
                        trial = bmat.copy()
                        trial[k, l] = trial[l, k] = b
                        s = VolKernelService._score(residuals, cfg, trial, nu)
                        if s < score:
                            score, bmat, changed = s, trial, True
                    logger.debug(f"Sweep {sweep + 1}, cell ({k + 1},{l + 1}): b={bmat[k, l]:.4e}")
                if not changed:
                    break
        return bmat, score, grid, scores

    @staticmethod
    def estimate(residuals: np.ndarray, cfg: Optional[KernelConfig] = None) -> VolPathEstimate:
        """Full pipeline: bandwidth selection (unless fixed), smoothing, regularization, roots."""
        cfg = cfg or KernelConfig()
        residuals = np.asarray(residuals, dtype=float)
        if residuals.ndim == 1:
            residuals = residuals[:, None]
        T, d = residuals.shape
        nu = cfg.nu_for(T)

        cv_grid = cv_scores = None
        if cfg.bandwidth is not None:
            bmat = np.full((d, d), cfg.bandwidth)
            sigma = VolKernelService.regularize(
                VolKernelService.smooth_residual_covariance(residuals, cfg, bmat), nu
            )
            score = VolKernelService.cv_criterion(residuals, sigma)
        else:
            bmat, score, cv_grid, cv_scores = VolKernelService.cross_validate(residuals, cfg)
            sigma = VolKernelService.regularize(
                VolKernelService.smooth_residual_covariance(residuals, cfg, bmat), nu
            )

        h = MatrixService.pd_sqrt_batch(sigma)
        logger.info(
            f"Volatility path estimated: kernel={cfg.kernel}, mode={cfg.bandwidth_mode}, "
            f"b={bmat[0, 0]:.4e}, cv={score:.6e}"
        )
        return VolPathEstimate(
            sigma_t=sigma,
            h_t=h,
            bandwidths=bmat,
            cv_score=score,
            nu=nu,
            kernel=cfg.kernel,
            cv_grid=cv_grid,
            cv_scores=cv_scores,
        )
