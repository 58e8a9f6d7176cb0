"""
Dense symmetric-matrix kernels shared by every other service.

Matrix functions go through a symmetric eigendecomposition; dimensions stay small
(d <= ~10, d^2 m <= a few hundred) so O(n^3) eigensolves are cheap and robust.
Batched variants operate on stacks of shape (n, d, d).
"""
import logging
from typing import Tuple

import numpy as np
from scipy import linalg

from varcheck.exceptions import (
    IndefiniteMatrix,
    NotSymmetric,
    SingularMatrix,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
CLAMP_TOL = 1e-10
SINGULAR_TOL = 1e-12


class MatrixService:
    """Eigen-based matrix functions, Kronecker/vec algebra and PSD checks."""

    @staticmethod
    def norm_inf(a: np.ndarray) -> float:
        """Maximum absolute row sum."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.size == 0:
            return 0.0
        return float(np.max(np.sum(np.abs(a), axis=-1)))

    @staticmethod
    def check_symmetric(a: np.ndarray) -> np.ndarray:
        """Return the symmetrized matrix, or raise NotSymmetric past the tolerance."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.shape[0] != a.shape[1]:
            raise NotSymmetric(f"Matrix of shape {a.shape} is not square")
        asym = MatrixService.norm_inf(a - a.T)
        scale = MatrixService.norm_inf(a)
        if asym > SYMMETRY_TOL * scale:
            raise NotSymmetric(
                f"Asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:g} x norm {scale:.3e}"
            )
        return 0.5 * (a + a.T)

    @staticmethod
    def symmetrize(a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        return 0.5 * (a + np.swapaxes(a, -1, -2))

    @staticmethod
    def eigh(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix."""
        a = MatrixService.check_symmetric(a)
        return linalg.eigh(a)

    @staticmethod
    def eigvals_sym(a: np.ndarray) -> np.ndarray:
        """Real eigenvalues in descending order."""
        a = MatrixService.check_symmetric(a)
        w = linalg.eigvalsh(a)
        return w[::-1].copy()

    @staticmethod
    def pd_sqrt(a: np.ndarray) -> np.ndarray:
        """Symmetric PSD square root; eigenvalues in [-1e-10 ||a||, 0) are clamped to 0."""
        w, v = MatrixService.eigh(a)
        scale = MatrixService.norm_inf(a)
        if w.size and w[0] < -CLAMP_TOL * scale:
            raise IndefiniteMatrix(
                f"Smallest eigenvalue {w[0]:.3e} below -{CLAMP_TOL:g} x norm {scale:.3e}"
            )
        w = np.clip(w, 0.0, None)
        s = (v * np.sqrt(w)) @ v.T
        return MatrixService.symmetrize(s)

    @staticmethod
    def pd_inv_sqrt(a: np.ndarray) -> np.ndarray:
        """Inverse symmetric square root of a positive definite matrix."""
        w, v = MatrixService.eigh(a)
        scale = MatrixService.norm_inf(a)
        if not w.size or w[0] <= SINGULAR_TOL * scale:
            smallest = w[0] if w.size else float('nan')
            raise SingularMatrix(
                f"Smallest eigenvalue {smallest:.3e} below {SINGULAR_TOL:g} x norm {scale:.3e}"
            )
        r = (v / np.sqrt(w)) @ v.T
        return MatrixService.symmetrize(r)

    @staticmethod
    def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.kron(np.atleast_2d(a), np.atleast_2d(b))

    @staticmethod
    def vec(a: np.ndarray) -> np.ndarray:
        """Column-stacking vectorization."""
        return np.asarray(a, dtype=float).reshape(-1, order='F')

    @staticmethod
    def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
        return np.asarray(v, dtype=float).reshape((rows, cols), order='F')

    @staticmethod
    def is_psd(a: np.ndarray, tol: float = 1e-8) -> bool:
        a = MatrixService.symmetrize(np.atleast_2d(a))
        if a.size == 0:
            return True
        w = linalg.eigvalsh(a)
        return bool(w[0] >= -tol * MatrixService.norm_inf(a))

    @staticmethod
    def cond_sym(a: np.ndarray) -> float:
        """Spectral condition number of a symmetric matrix (inf when singular)."""
        a = MatrixService.symmetrize(np.atleast_2d(a))
        w = np.abs(linalg.eigvalsh(a))
        if not w.size:
            return 1.0
        if w.min() == 0.0:
            return float('inf')
        return float(w.max() / w.min())

    @staticmethod
    def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Solve a x = b for symmetric positive definite a by Cholesky."""
        a = MatrixService.symmetrize(np.atleast_2d(a))
        try:
            factor = linalg.cho_factor(a, lower=True, check_finite=True)
        except (linalg.LinAlgError, ValueError) as e:
            raise SingularMatrix(f"Cholesky factorization failed: {e}") from e
        return linalg.cho_solve(factor, b)

    @staticmethod
    def inv_spd(a: np.ndarray) -> np.ndarray:
        a = np.atleast_2d(a)
        return MatrixService.symmetrize(MatrixService.solve_spd(a, np.eye(a.shape[0])))

    # Batched variants on stacks (n, d, d)

    @staticmethod
    def eigh_batch(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(MatrixService.symmetrize(a))

    @staticmethod
    def spectral_apply_batch(a: np.ndarray, func) -> np.ndarray:
        """Apply a scalar function to the eigenvalues of every matrix in the stack."""
        w, v = MatrixService.eigh_batch(a)
        out = np.einsum('nij,nj,nkj->nik', v, func(w), v)
        return MatrixService.symmetrize(out)

    @staticmethod
    def pd_sqrt_batch(a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        w, v = MatrixService.eigh_batch(a)
        scale = np.max(np.sum(np.abs(a), axis=-1), axis=-1)
        if np.any(w[:, 0] < -CLAMP_TOL * scale):
            idx = int(np.argmin(w[:, 0] + CLAMP_TOL * scale))
            raise IndefiniteMatrix(f"Matrix {idx} of the stack has eigenvalue {w[idx, 0]:.3e}")
        root = np.sqrt(np.clip(w, 0.0, None))
        return MatrixService.symmetrize(np.einsum('nij,nj,nkj->nik', v, root, v))

    @staticmethod
    def pd_inv_sqrt_batch(a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        w, v = MatrixService.eigh_batch(a)
        scale = np.max(np.sum(np.abs(a), axis=-1), axis=-1)
        if np.any(w[:, 0] <= SINGULAR_TOL * scale):
            idx = int(np.argmin(w[:, 0] - SINGULAR_TOL * scale))
            raise SingularMatrix(f"Matrix {idx} of the stack has eigenvalue {w[idx, 0]:.3e}")
        return MatrixService.symmetrize(np.einsum('nij,nj,nkj->nik', v, 1.0 / np.sqrt(w), v))

    @staticmethod
    def inv_batch(a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        w, v = MatrixService.eigh_batch(a)
        scale = np.max(np.sum(np.abs(a), axis=-1), axis=-1)
        if np.any(w[:, 0] <= SINGULAR_TOL * scale):
            idx = int(np.argmin(w[:, 0] - SINGULAR_TOL * scale))
            raise SingularMatrix(f"Matrix {idx} of the stack has eigenvalue {w[idx, 0]:.3e}")
        return MatrixService.symmetrize(np.einsum('nij,nj,nkj->nik', v, 1.0 / w, v))
