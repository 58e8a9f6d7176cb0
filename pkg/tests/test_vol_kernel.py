import numpy as np
import pytest
from pydantic import ValidationError

from varcheck.exceptions import DegenerateKernel, EmptyGrid
from varcheck.models.kernel import KernelConfig
from varcheck.services.vol_kernel import VolKernelService


def test_kernel_weights_flat_limit():
    w = VolKernelService.kernel_weights(2, 3, 1e6)
    np.testing.assert_allclose(w, [0.5, 0.0, 0.5], atol=1e-12)


def test_kernel_weights_formula():
    w = VolKernelService.kernel_weights(1, 5, 0.2)
    k = np.exp(-0.5 * np.arange(1, 5) ** 2)
    assert w[0] == 0.0
    np.testing.assert_allclose(w[1:], k / k.sum())


@pytest.mark.parametrize("kernel", ["gaussian", "triangular", "epanechnikov"])
def test_kernel_weights_normalized(rng, kernel):
    for _ in range(20):
        T = int(rng.integers(5, 200))
        t = int(rng.integers(1, T + 1))
        b = float(rng.uniform(0.3, 2.0))
        w = VolKernelService.kernel_weights(t, T, b, kernel)
        assert w.sum() == pytest.approx(1.0)
        assert w[t - 1] == 0.0
        assert np.all(w >= 0)


def test_kernel_weights_degenerate_compact_kernel():
    with pytest.raises(DegenerateKernel):
        VolKernelService.kernel_weights(5, 10, 0.01, "triangular")


def test_unknown_kernel():
    with pytest.raises(ValueError):
        VolKernelService.kernel_function("cosine")


def test_smoothing_constant_residuals():
    c = np.array([1.5, -0.5])
    residuals = np.tile(c, (40, 1))
    sigma0 = VolKernelService.smooth_residual_covariance(residuals, KernelConfig(), 0.1)
    np.testing.assert_allclose(sigma0, np.broadcast_to(np.outer(c, c), sigma0.shape), atol=1e-12)


def test_smoothing_flat_limit_is_leave_one_out_mean(rng):
    u = rng.standard_normal(20)
    sigma0 = VolKernelService.smooth_residual_covariance(u, KernelConfig(), 1e6)
    expected = (np.sum(u ** 2) - u ** 2) / 19
    np.testing.assert_allclose(sigma0[:, 0, 0], expected, rtol=1e-9)


def test_fft_and_dense_paths_agree(rng, mocker):
    u = rng.standard_normal((200, 2))
    cfg = KernelConfig()
    dense = VolKernelService.smooth_residual_covariance(u, cfg, 0.05)
    mocker.patch('varcheck.services.vol_kernel.DIRECT_LIMIT', 10)
    fft = VolKernelService.smooth_residual_covariance(u, cfg, 0.05)
    np.testing.assert_allclose(fft, dense, atol=1e-10)


def test_per_cell_bandwidth_matrix_is_symmetric(rng):
    u = rng.standard_normal((60, 2))
    b = np.array([[0.1, 0.3], [0.3, 0.2]])
    sigma0 = VolKernelService.smooth_residual_covariance(u, KernelConfig(), b)
    np.testing.assert_allclose(sigma0, np.swapaxes(sigma0, 1, 2))
    single = VolKernelService.smooth_residual_covariance(u, KernelConfig(), 0.1)
    np.testing.assert_allclose(sigma0[:, 0, 0], single[:, 0, 0])


def test_regularize_examples():
    psd = np.array([[2.0, 0.5], [0.5, 1.0]])
    np.testing.assert_allclose(VolKernelService.regularize(psd, 0.0), psd, atol=1e-12)
    assert VolKernelService.regularize(np.array([[3.0]]), 1.0)[0, 0] == pytest.approx(np.sqrt(10.0))
    out = VolKernelService.regularize(np.diag([2.0, -0.001]), 1e-6)
    np.testing.assert_allclose(np.linalg.eigvalsh(out), [np.sqrt(2e-6), np.sqrt(4 + 1e-6)], rtol=1e-9)


def test_regularize_perturbation_bound(rng):
    a = rng.standard_normal((3, 3))
    psd = a @ a.T
    nu = 0.01
    out = VolKernelService.regularize(psd, nu)
    assert np.linalg.norm(out - psd) <= np.sqrt(3 * nu) + 1e-12


def test_cross_validate_two_point_grid(rng):
    u = rng.standard_normal((80, 2))
    cfg = KernelConfig()
    grid = np.array([0.02, 0.5])
    bmat, score, _, scores = VolKernelService.cross_validate(u, cfg, grid)
    best = grid[int(np.argmin(scores))]
    np.testing.assert_allclose(bmat, np.full((2, 2), best))
    assert score == pytest.approx(scores.min())


def test_cross_validate_empty_grid(rng):
    with pytest.raises(EmptyGrid):
        VolKernelService.cross_validate(rng.standard_normal((30, 2)), KernelConfig(), np.array([]))


def test_per_cell_mode_does_not_worsen_score(rng):
    u = rng.standard_normal((120, 2)) * np.linspace(1, 3, 120)[:, None]
    single = KernelConfig(grid_points=8)
    per_cell = KernelConfig(grid_points=8, bandwidth_mode="per-cell")
    _, s_single, _, _ = VolKernelService.cross_validate(u, single)
    _, s_cell, _, _ = VolKernelService.cross_validate(u, per_cell)
    assert s_cell <= s_single


def test_iid_data_prefers_large_bandwidth(rng):
    u = rng.standard_normal((2000, 1))
    cfg = KernelConfig(grid_points=2)
    _, _, grid, scores = VolKernelService.cross_validate(u, cfg)
    assert scores[-1] <= scores[0]


def test_estimate_roots_and_fixed_bandwidth(rng):
    u = rng.standard_normal((100, 2))
    est = VolKernelService.estimate(u, KernelConfig(bandwidth=0.1))
    assert est.cv_grid is None
    np.testing.assert_allclose(np.einsum('tij,tjk->tik', est.h_t, est.h_t), est.sigma_t, atol=1e-7)
    assert np.all(np.linalg.eigvalsh(est.sigma_t) > 0)


def test_estimate_recovers_constant_covariance(rng):
    sigma = np.array([[2.0, 0.6], [0.6, 1.0]])
    u = rng.multivariate_normal(np.zeros(2), sigma, size=5000)
    est = VolKernelService.estimate(u, KernelConfig(grid_points=20))
    interior = est.sigma_t[500:4500]
    rel = np.linalg.norm(interior - sigma, axis=(1, 2)) / np.linalg.norm(sigma)
    assert rel.max() <= 0.1
    assert est.cv_scores.shape == (20,)


@pytest.mark.slow
def test_constant_volatility_path_flattens_with_T():
    spreads = []
    for T in (500, 2000, 8000):
        u = np.random.default_rng(T).standard_normal((T, 2))
        sigma = VolKernelService.estimate(u, KernelConfig(grid_points=40)).sigma_t
        mid = sigma[T // 2]
        inner = sigma[T // 10:9 * T // 10]
        spreads.append(np.max(np.linalg.norm(inner - mid, axis=(1, 2))))
    assert spreads[0] > spreads[1] > spreads[2]


def test_kernel_config_validation():
    with pytest.raises(ValidationError):
        KernelConfig(c_min=2.0, c_max=1.0)
    with pytest.raises(ValidationError):
        KernelConfig(grid_points=1)
    with pytest.raises(ValidationError):
        KernelConfig(nu=-1.0)
    assert KernelConfig(nu="auto").nu_for(1000) == pytest.approx(1000 ** -0.6)
    grid = KernelConfig().bandwidth_grid(1000)
    assert grid.size == 200
    assert grid[0] == pytest.approx(0.2 * 0.1)
    assert grid[-1] == pytest.approx(5.0 * 0.1)
