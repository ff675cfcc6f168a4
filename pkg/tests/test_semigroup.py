import numpy as np
import pytest

from rbmibp import closedform as cf
from rbmibp import functionals as fn
from rbmibp import kernels as K
from rbmibp import semigroup as sg
from rbmibp.paths import Grid, Path, sample_bm_batch, spectral_coefficients
from rbmibp.spectral import SpectralBasis


@pytest.fixture(scope="module")
def basis():
    return SpectralBasis(512)


@pytest.fixture(scope="module")
def tf():
    return fn.bump_test_function()


def _z_path(n=4096, seed=11):
    rng = np.random.default_rng(seed)
    return Path(Grid(n), sample_bm_batch(Grid(n), rng, 1)[0])


def test_attenuation_tends_to_one_for_small_width(basis):
    r_wide = sg.attenuation(K.MollifierSpec("bump", 0.05), basis)
    r_thin = sg.attenuation(K.MollifierSpec("bump", 0.001), basis)
    assert abs(r_thin[0] - 1.0) < abs(r_wide[0] - 1.0)
    assert np.max(np.abs(r_thin[:32] - 1.0)) <= 1e-3
    assert np.all(np.abs(r_wide) <= 1.0 + 1e-12)


def test_c_eps_series_matches_double_quadrature(basis):
    spec = K.MollifierSpec("bump", 0.04, quad_points=2048)
    series = sg.c_eps_series(spec, basis, 0.45)
    assert float(series) == pytest.approx(K.c_eps(spec, 0.45), rel=1e-5)


def test_nu_dual_routes_agree():
    # series form vs direct smoothed derivative of the covariance slice
    N = 1024
    basis_hi = SpectralBasis(N)
    spec = K.MollifierSpec("bump", 0.03)
    theta, t = 0.45, 0.12
    nu_series = float(sg.nu_eps(spec, basis_hi, theta, t))
    bundle = cf.covariances(t, N)

    def q_slice(sigma):
        return np.squeeze(bundle.q_t(np.atleast_1d(sigma),
                                     np.array([theta])))

    nu_quad = K.mollified_derivative_fn(q_slice, spec, theta)
    assert abs(nu_series - nu_quad) <= 1e-8


def test_components_sum_to_value(tf, basis):
    z = _z_path()
    spec = K.MollifierSpec("bump", 0.03125)
    ev = sg.ptG_eps(z, 0.2, tf, spec, basis)
    assert ev.value == pytest.approx(sum(ev.components), rel=1e-14)


def test_ptg_zero_field_drops_odd_terms(tf, basis):
    z = Path(Grid(512), np.zeros(513))
    spec = K.MollifierSpec("bump", 0.03125)
    ev = sg.ptG_eps(z, 0.3, tf, spec, basis)
    assert ev.components[0] == pytest.approx(0.0, abs=1e-13)
    assert ev.components[2] == pytest.approx(0.0, abs=1e-13)
    assert ev.components[1] < 0.0 and ev.components[3] < 0.0


def test_ptg_long_time_limit_is_the_mean(tf, basis):
    z = _z_path()
    spec = K.MollifierSpec("bump", 0.03125)
    ev = sg.ptG_eps(z, 40.0, tf, spec, basis)
    assert ev.value == pytest.approx(cf.mean_G(tf, 0.0), abs=1e-8)


def test_ptg_rejects_vanishing_time(tf, basis):
    z = _z_path()
    spec = K.MollifierSpec("bump", 0.03125)
    with pytest.raises(ValueError):
        sg.ptG_eps(z, 0.0, tf, spec, basis)
    with pytest.raises(ValueError):
        sg.ptG_eps(z, 1e-9, tf, spec, basis)


def test_mehler_oracle_matches_formula(tf, basis):
    z = _z_path(seed=21)
    rng = np.random.default_rng(5)
    for t, eps in ((0.5, 0.03125), (0.125, 0.0078125)):
        spec = K.MollifierSpec("bump", eps)
        exact = sg.ptG_eps(z, t, tf, spec, basis).value
        est, se = sg.mehler_mc(z, t, tf, spec, basis, 4000, rng)
        assert est == pytest.approx(exact, abs=4 * se)


def test_tower_property(tf, basis):
    # P_{t+s} at z == average over fluctuations v of P_t at (evolved z + v)
    z = _z_path(seed=31)
    spec = K.MollifierSpec("bump", 0.03125)
    s, t = 0.15, 0.25
    target = sg.ptG_eps(z, s + t, tf, spec, basis).value

    rng = np.random.default_rng(6)
    m = 4000
    zc = spectral_coefficients(z.values, z.grid, basis)[0]
    evolved = np.exp(-basis.lam * s / 2.0) * zc
    vstd = np.sqrt((1.0 - np.exp(-basis.lam * s)) / basis.lam)
    coeff = evolved + rng.standard_normal((m, basis.N)) * vstd
    tables = sg._PtGTables(t, tf, spec, basis)
    vals = np.sum(tables.evaluate(coeff), axis=1)
    se = np.std(vals, ddof=1) / np.sqrt(m)
    assert np.mean(vals) == pytest.approx(target, abs=4 * se)


def test_ptg_norm_estimates_are_finite_and_positive(tf, basis):
    rng = np.random.default_rng(7)
    spec = K.MollifierSpec("bump", 0.03125)
    est, se = sg.ptG_norm(0.25, tf, spec, 500, rng, basis)
    assert np.isfinite(est) and est > 0.0 and se > 0.0


def test_expc_exact_norm_matches_mc(basis):
    ef = fn.eigenmode_exp_functional(1)
    rng = np.random.default_rng(8)
    t_grid = [1.0, 2.0]
    est, se, _ = sg.expc_decay(ef, t_grid, 4000, rng, basis)
    for e, s, t in zip(est, se, t_grid):
        assert e == pytest.approx(sg.expc_norm_sq_exact(ef, t, basis),
                                  abs=4 * s)


def test_expc_fitted_rate_close_to_spectral_gap(basis):
    ef = fn.eigenmode_exp_functional(1)
    rng = np.random.default_rng(9)
    _, _, rate = sg.expc_decay(ef, [1.0, 1.5, 2.0, 2.5, 3.0], 4000, rng,
                               basis)
    lam1 = basis.lam[0]
    # the first-mode functional decays at the spectral rate, which is
    # stronger than the guaranteed 2/lambda_1 bound
    assert rate == pytest.approx(lam1, rel=0.1)
    assert rate >= 2.0 / lam1


def test_constant_functional_has_zero_norm(basis):
    ef = fn.zero_exp_functional()
    rng = np.random.default_rng(10)
    est, _, _ = sg.expc_decay(ef, [1.0, 2.0], 500, rng, basis)
    assert np.all(est == 0.0)
