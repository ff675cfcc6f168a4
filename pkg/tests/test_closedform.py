import numpy as np
import pytest

from rbmibp import closedform as cf
from rbmibp import functionals as fn
from rbmibp import kernels as K
from rbmibp import semigroup as sg
from rbmibp.quadrature import composite_gl
from rbmibp.spectral import SpectralBasis


def test_lambda_fn_values():
    assert cf.lambda_fn(0.5, 1.0, 1.0) == pytest.approx(3.5)
    assert cf.lambda_fn(0.3, 0.0, 0.0) == pytest.approx(-1.0 / 1.2)
    assert cf.lambda_fn(1.0, 0.0, 1.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        cf.lambda_fn(0.0, 1.0, 1.0)


def test_q_transform_constant_density():
    K_, Kp = cf.q_transform(lambda t: np.ones_like(t))
    theta = np.linspace(0.0, 1.0, 11)
    assert K_(theta) == pytest.approx(theta - theta**2 / 2, abs=1e-8)
    assert Kp(theta) == pytest.approx(1.0 - theta, abs=1e-8)
    assert K_(0.0) == 0.0
    assert Kp(1.0) == 0.0


def test_q_transform_eigenfunction():
    basis = SpectralBasis(2)
    K_, _ = cf.q_transform(
        lambda t: np.sqrt(2.0) * np.sin(basis.freq[1] * t))
    theta = np.linspace(0.05, 0.95, 7)
    expected = np.sqrt(2.0) * np.sin(basis.freq[1] * theta) / basis.lam[1]
    assert K_(theta) == pytest.approx(expected, abs=1e-7)


def test_mean_negative_for_nonnegative_weight_at_zero_level():
    tf = fn.bump_test_function()
    assert cf.mean_G(tf, 0.0) < 0.0


def test_laplace_rhs_reduces_to_mean_for_zero_functional():
    tf = fn.bump_test_function()
    ef0 = fn.zero_exp_functional()
    for a in (0.0, 0.25, -0.4):
        assert cf.laplace_rhs(tf, ef0, a) == cf.mean_G(tf, a)


def test_folded_normal_mean_against_simulation():
    rng = np.random.default_rng(0)
    x = rng.normal(0.4, 0.7, 200000)
    assert cf.folded_normal_mean(0.4, 0.7) == pytest.approx(
        np.mean(np.abs(x)), abs=0.01)


def test_ibp_closed_forms_agree():
    tf = fn.bump_test_function()
    for ef in (fn.zero_exp_functional(),
               fn.eigenmode_exp_functional(1),
               fn.constant_exp_functional(1.5)):
        for a in (0.0, 0.3, -0.5):
            lhs = cf.ibp_lhs_sign(tf, ef, a)
            rhs = cf.ibp_rhs_sign(tf, ef, a)
            assert abs(lhs - rhs) <= 1e-6


def test_zero_functional_ibp_reduces_to_mean_identity():
    # with no exponential weight: 2 * mean = int h'' E|B - a|
    tf = fn.bump_test_function()
    a = 0.2
    nodes, w = cf.support_rule(tf)
    rhs = np.sum(w * tf.deriv2(nodes)
                 * cf.folded_normal_mean(-a, np.sqrt(nodes)))
    assert 2.0 * cf.mean_G(tf, a) == pytest.approx(rhs, abs=1e-10)


def test_quadratic_rhs_scaling():
    ef1 = fn.constant_exp_functional(1.0)
    ef2 = fn.constant_exp_functional(2.0)
    # int K'^2 scales by 4, the exponential prefactor by exp(3/2 * 1/3)
    assert cf.quadratic_rhs(ef2) == pytest.approx(
        4.0 * np.exp(0.5 * (4 / 3 - 1 / 3)) * cf.quadratic_rhs(ef1),
        rel=1e-12)
    assert cf.quadratic_rhs(fn.zero_exp_functional()) == 0.0


# ---------------------------------------------------------------------------
# covariance series
# ---------------------------------------------------------------------------

def test_covariance_splitting_identity():
    bundle = cf.covariances(0.07, 512)
    theta = np.array([0.13, 0.4, 0.77])
    tp = np.array([0.3, 0.55, 0.91])
    total = bundle.q_t(theta, tp) + bundle.q_upper(theta, tp)
    mins = np.minimum(theta[:, None], tp[None, :])
    assert np.max(np.abs(total - mins)) <= bundle.tail_bound()


def test_stationary_covariance_is_min():
    bundle = cf.covariances(1e6, 512)
    assert float(bundle.q_t(0.3, 0.7)) == pytest.approx(
        0.3, abs=bundle.tail_bound())


def test_diag_complement_route_matches_direct_series():
    bundle = cf.covariances(0.05, 512)
    theta = np.array([0.2, 0.5, 0.9])
    direct = np.diag(np.atleast_2d(bundle.q_t(theta, theta)))
    # on the diagonal the truncated direct series can fluctuate up to about
    # twice the averaged tail bound (sin^2 factors instead of sin products)
    assert bundle.q_t_diag(theta) == pytest.approx(
        direct, abs=2 * bundle.tail_bound())


def test_chapman_kolmogorov():
    s, t = 0.08, 0.15
    bs, bt, bst = (cf.covariances(s, 512), cf.covariances(t, 512),
                   cf.covariances(s + t, 512))
    nodes, w = composite_gl(0.0, 1.0, panels=64, order=10)
    for theta, tp in ((0.35, 0.6), (0.2, 0.2), (0.7, 0.15)):
        lhs = np.sum(w * np.asarray(bt.g_t(theta, nodes)).ravel()
                     * np.asarray(bs.g_t(nodes, tp)).ravel())
        assert abs(lhs - float(bst.g_t(theta, tp))) <= 1e-6


def test_heat_kernel_boundary_conditions():
    bundle = cf.covariances(0.1, 256)
    assert float(bundle.g_t(0.0, 0.4)) == pytest.approx(0.0, abs=1e-12)
    # reflecting end: derivative in the first slot vanishes at 1
    h = 1e-5
    slope = (float(bundle.g_t(1.0, 0.4))
             - float(bundle.g_t(1.0 - h, 0.4))) / h
    assert abs(slope) <= 1e-3


def test_small_time_diagonal_grows_like_sqrt_t():
    # fitted exponent of q_t(theta) vs t on a dyadic grid is about 1/2
    ts = 2.0 ** -np.arange(4, 11)
    theta = np.array([0.5])
    qs = [float(cf.covariances(t, 2048).q_t_diag(theta)) for t in ts]
    slope = np.polyfit(np.log(ts), np.log(qs), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.05)


def test_c_t0_and_nu0_limits():
    assert cf.c_t0(0.4, 50.0, 256) == pytest.approx(0.0, abs=1e-12)
    assert cf.nu0(0.4, 50.0, 256) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        cf.c_t0(0.4, 0.0, 256)
    with pytest.raises(ValueError):
        cf.nu0(0.4, -1.0, 256)


def test_nu0_log_growth_is_mild():
    ts = 2.0 ** -np.arange(1, 12)
    vals = np.array([abs(cf.nu0(0.5, t, 2048)) for t in ts])
    # |nu| should grow at most like a constant times (1 + |ln t|)
    assert np.all(vals <= 2.0 * (1.0 + np.abs(np.log(ts))))


def test_c_eps_t_converges_to_c_t0():
    basis = SpectralBasis(512)
    t, theta = 0.04, 0.45
    target = cf.c_t0(theta, t, 512)
    devs = [abs(sg.c_eps_t(K.MollifierSpec("bump", e), basis, theta, t)
                - target) for e in (0.04, 0.01, 0.0025)]
    assert devs[-1] <= 1e-3 * abs(target)
    assert devs[0] > devs[-1]


def test_rg0_integrand_zero_field():
    from rbmibp.paths import Grid, Path

    grid = Grid(512)
    z = Path(grid, np.zeros(513))
    tf = fn.bump_test_function()
    t, theta, N = 0.05, 0.5, 256
    val = cf.rg0_integrand(z, t, theta, tf, N)
    q = float(cf.covariances(t, N).q_t_diag(np.array([theta])))
    expected = (-tf(np.array([theta]))[0] / np.sqrt(2 * np.pi * q)
                * (cf.c_t0(theta, t, N) + cf.nu0(theta, t, N) ** 2 / q))
    assert float(val) == pytest.approx(expected, rel=1e-12)


def test_rg0_time_tail_is_negligible():
    from rbmibp.paths import Grid, Path

    grid = Grid(512)
    rng = np.random.default_rng(5)
    vals = np.concatenate(
        [[0.0], np.cumsum(rng.normal(0, np.sqrt(1 / 512), 512))])
    z = Path(grid, vals)
    tf = fn.bump_test_function()
    theta = 0.5
    # large-t limit: the field is forgotten and the integrand settles at
    # the stationary value -h(theta) * N(0; 0, theta) / (4 theta); beyond
    # t = 10 the distance to that limit is far below 1e-8
    stationary = (-tf(np.array([theta]))[0]
                  / np.sqrt(2 * np.pi * theta) / (4 * theta))
    val = float(cf.rg0_integrand(z, 10.0, theta, tf, 256))
    assert abs(val - stationary) <= 1e-8
