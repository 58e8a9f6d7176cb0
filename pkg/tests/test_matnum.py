import numpy as np
import pytest

from varcheck.exceptions import IndefiniteMatrix, NotSymmetric, SingularMatrix
from varcheck.services.matnum import MatrixService


def random_spd(rng, n):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


def test_check_symmetric_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        MatrixService.check_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_check_symmetric_rejects_non_square():
    with pytest.raises(NotSymmetric):
        MatrixService.check_symmetric(np.ones((2, 3)))


def test_eigvals_sym_descending(rng):
    a = random_spd(rng, 5)
    w = MatrixService.eigvals_sym(a)
    assert np.all(np.diff(w) <= 0)
    np.testing.assert_allclose(np.sum(w), np.trace(a))


def test_pd_sqrt_squares_back(rng):
    a = random_spd(rng, 4)
    s = MatrixService.pd_sqrt(a)
    np.testing.assert_allclose(s @ s, a, atol=1e-10)
    np.testing.assert_allclose(s, s.T)


def test_pd_sqrt_clamps_tiny_negative_eigenvalue():
    a = np.diag([1.0, -1e-13])
    s = MatrixService.pd_sqrt(a)
    np.testing.assert_allclose(s, np.diag([1.0, 0.0]))


def test_pd_sqrt_rejects_indefinite():
    with pytest.raises(IndefiniteMatrix):
        MatrixService.pd_sqrt(np.diag([1.0, -0.5]))


def test_pd_inv_sqrt(rng):
    a = random_spd(rng, 3)
    r = MatrixService.pd_inv_sqrt(a)
    np.testing.assert_allclose(r @ a @ r, np.eye(3), atol=1e-10)


def test_pd_inv_sqrt_rejects_singular():
    with pytest.raises(SingularMatrix):
        MatrixService.pd_inv_sqrt(np.diag([1.0, 0.0]))


def test_vec_is_column_stacking():
    a = np.array([[1.0, 3.0], [2.0, 4.0]])
    np.testing.assert_array_equal(MatrixService.vec(a), [1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(MatrixService.unvec(MatrixService.vec(a), 2, 2), a)


def test_vec_kron_identity(rng):
    a, x, b = rng.standard_normal((2, 3)), rng.standard_normal((3, 4)), rng.standard_normal((4, 2))
    lhs = MatrixService.vec(a @ x @ b)
    rhs = MatrixService.kron(b.T, a) @ MatrixService.vec(x)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_is_psd():
    assert MatrixService.is_psd(np.diag([2.0, 0.0]))
    assert not MatrixService.is_psd(np.diag([2.0, -1.0]))
    assert MatrixService.is_psd(np.zeros((0, 0)))


def test_cond_sym():
    assert MatrixService.cond_sym(np.diag([4.0, 2.0])) == pytest.approx(2.0)
    assert MatrixService.cond_sym(np.diag([1.0, 0.0])) == float('inf')


def test_solve_spd_matches_inverse(rng):
    a = random_spd(rng, 4)
    b = rng.standard_normal(4)
    np.testing.assert_allclose(MatrixService.solve_spd(a, b), np.linalg.solve(a, b), atol=1e-10)
    np.testing.assert_allclose(MatrixService.inv_spd(a) @ a, np.eye(4), atol=1e-10)


def test_solve_spd_rejects_indefinite():
    with pytest.raises(SingularMatrix):
        MatrixService.solve_spd(np.diag([1.0, -1.0]), np.ones(2))


def test_batched_roots_match_single(rng):
    stack = np.stack([random_spd(rng, 3) for _ in range(5)])
    roots = MatrixService.pd_sqrt_batch(stack)
    inv_roots = MatrixService.pd_inv_sqrt_batch(stack)
    inverses = MatrixService.inv_batch(stack)
    for k in range(5):
        np.testing.assert_allclose(roots[k], MatrixService.pd_sqrt(stack[k]), atol=1e-10)
        np.testing.assert_allclose(inv_roots[k] @ stack[k] @ inv_roots[k], np.eye(3), atol=1e-9)
        np.testing.assert_allclose(inverses[k] @ stack[k], np.eye(3), atol=1e-9)


def test_batched_sqrt_rejects_indefinite_member():
    stack = np.stack([np.eye(2), np.diag([1.0, -1.0])])
    with pytest.raises(IndefiniteMatrix):
        MatrixService.pd_sqrt_batch(stack)


def test_spectral_apply_batch():
    stack = np.stack([np.diag([1.0, 4.0]), np.diag([9.0, 16.0])])
    out = MatrixService.spectral_apply_batch(stack, np.sqrt)
    np.testing.assert_allclose(out[1], np.diag([3.0, 4.0]), atol=1e-12)
