import numpy as np
import pytest

from rbmibp import paths
from rbmibp.quadrature import cell_aligned_gl, composite_gl
from rbmibp.spectral import SpectralBasis, eigenvalues


def test_eigenvalues_formula():
    lam = eigenvalues(3)
    assert lam == pytest.approx(np.pi**2 / 4 * np.array([1.0, 9.0, 25.0]))


def test_eigenfunctions_orthonormal():
    basis = SpectralBasis(8)
    nodes, w = composite_gl(0.0, 1.0, panels=64, order=10)
    e = basis.evaluate(nodes)
    gram = e.T @ (w[:, None] * e)
    assert np.max(np.abs(gram - np.eye(8))) <= 1e-12


def test_covariance_operator_diagonalized():
    # int min(theta, sigma) e_i(sigma) dsigma = e_i(theta) / lambda_i
    basis = SpectralBasis(4)
    for theta in (0.21, 0.58, 0.83):
        # min(theta, sigma) has a kink at sigma = theta; align panels there
        edges = np.concatenate([np.linspace(0.0, theta, 33),
                                np.linspace(theta, 1.0, 33)[1:]])
        nodes, w = cell_aligned_gl(edges, order=8)
        mins = np.minimum(theta, nodes)
        lhs = (w * mins) @ basis.evaluate(nodes)
        rhs = basis.evaluate(theta)[0] / basis.lam
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_eigenfunction_derivative_matches_difference_quotient():
    basis = SpectralBasis(6)
    theta, h = 0.37, 1e-6
    num = (basis.evaluate(theta + h) - basis.evaluate(theta - h)) / (2 * h)
    assert np.max(np.abs(num - basis.evaluate_deriv(theta))) <= 1e-4


def test_grid_and_path_validation():
    with pytest.raises(ValueError):
        paths.Grid(1)
    grid = paths.Grid(8)
    with pytest.raises(ValueError):
        paths.Path(grid, np.ones(9))  # does not start at 0
    with pytest.raises(ValueError):
        paths.Path(grid, np.zeros(5))


def test_bm_increment_moments():
    grid = paths.Grid(256)
    rng = np.random.default_rng(0)
    values = paths.sample_bm_batch(grid, rng, 4000)
    inc = np.diff(values, axis=1)
    assert np.mean(inc) == pytest.approx(0.0, abs=4e-4)
    assert np.var(inc) == pytest.approx(grid.step, rel=0.02)
    # terminal variance is Var B_1 = 1
    assert np.var(values[:, -1]) == pytest.approx(1.0, rel=0.1)


def test_spectral_coefficients_recover_kl_sample():
    grid = paths.Grid(4096)
    basis = SpectralBasis(16)
    rng = np.random.default_rng(1)
    path = paths.sample_bm_spectral(16, rng, grid)
    coeff = paths.spectral_coefficients(path.values, grid, basis)[0]
    # the path was built as e @ (xi / sqrt(lam)); projecting back recovers
    # the coefficients up to trapezoid error
    rng2 = np.random.default_rng(1)
    xi = rng2.standard_normal(16)
    assert coeff == pytest.approx(xi / np.sqrt(basis.lam), abs=2e-5)


def test_heat_evolve_single_mode_decays_exactly():
    grid = paths.Grid(2048)
    basis = SpectralBasis(4)
    e1 = np.sqrt(2.0) * np.sin(basis.freq[0] * grid.nodes)
    path = paths.Path(grid, e1)
    t = 0.3
    evolved = paths.heat_evolve(path, t, basis)
    assert evolved == pytest.approx(
        np.exp(-basis.lam[0] * t / 2.0) * e1, abs=1e-6)


def test_v_field_covariance_matches_series():
    grid = paths.Grid(256)
    basis = SpectralBasis(64)
    rng = np.random.default_rng(2)
    t = 0.2
    v = paths.sample_v_field_batch(t, basis, rng, grid, 6000)
    j = 128
    theta = grid.nodes[j]
    e = basis.evaluate(theta)[0]
    target = float(np.sum((1 - np.exp(-basis.lam * t)) / basis.lam * e**2))
    sample = v[:, j] ** 2
    stderr = np.std(sample, ddof=1) / np.sqrt(len(sample))
    assert np.mean(sample) == pytest.approx(target, abs=4 * stderr)
