import numpy as np
import pytest

from rbmibp import localtime as lt
from rbmibp.paths import Grid, Path, sample_bm_batch


def test_sign_convention_is_minus_one_at_zero():
    assert lt.sign_convention(0.0) == -1.0
    assert lt.sign_convention(-3.0) == -1.0
    assert lt.sign_convention(1e-12) == 1.0


def test_occupation_counts_time_in_window():
    # sawtooth path crossing zero: occupation of the window is explicit
    n = 1000
    nodes = np.linspace(0.0, 1.0, n + 1)
    path = 0.2 * np.sin(4 * np.pi * nodes)
    delta = 0.05
    curve = lt.occupation_localtime(path, 0.0, delta)
    frac = np.mean(np.abs(path[:-1]) < delta)
    assert curve.values[-1] == pytest.approx(frac / (2 * delta), rel=1e-12)
    assert curve.values[0] == 0.0
    assert np.all(np.diff(curve.values) >= 0)


def test_one_sided_estimate_of_reflected_path_doubles_symmetric():
    rng = np.random.default_rng(0)
    values = sample_bm_batch(Grid(2048), rng, 50)
    a = 0.2
    delta = 2048 ** (-1.0 / 3.0)
    sym = lt.occupation_localtime_batch(values, a, delta)
    one = lt.occupation_localtime_batch(np.abs(values - a), 0.0, delta,
                                        one_sided=True)
    assert np.array_equal(one, 2.0 * sym)


def test_tanaka_estimator_monotone_and_close_to_occupation():
    rng = np.random.default_rng(1)
    values = sample_bm_batch(Grid(4096), rng, 200)
    occ = lt.occupation_localtime_batch(values, 0.0, 4096 ** (-1.0 / 3.0))
    tan, corr = lt.tanaka_localtime_batch(values, 0.0)
    assert np.all(np.diff(tan, axis=1) >= 0)
    assert np.all(corr >= 0)
    # terminal values of the two estimators agree on average
    gap = occ[:, -1] - tan[:, -1]
    stderr = np.std(gap, ddof=1) / np.sqrt(len(gap))
    bias = 4096 ** (-1.0 / 3.0) + 2 / np.sqrt(4096)
    assert abs(np.mean(gap)) <= 4 * stderr + bias


def test_terminal_local_time_mean_matches_folded_normal():
    # E[L^0_1] = E|B_1| = sqrt(2/pi)
    rng = np.random.default_rng(2)
    values = sample_bm_batch(Grid(4096), rng, 3000)
    delta = 4096 ** (-1.0 / 3.0)
    terminal = lt.occupation_localtime_batch(values, 0.0, delta)[:, -1]
    stderr = np.std(terminal, ddof=1) / np.sqrt(len(terminal))
    assert np.mean(terminal) == pytest.approx(
        np.sqrt(2 / np.pi), abs=4 * stderr + delta)


def test_path_far_from_level_has_zero_local_time():
    n = 512
    path = np.linspace(0.0, 0.3, n + 1)
    curve = lt.occupation_localtime(path, 2.0, 0.05)
    assert np.all(curve.values == 0.0)


def test_coarse_bandwidth_flagged():
    path = np.zeros(65)
    curve = lt.occupation_localtime(path, 0.0, 0.01)
    assert curve.coarse_bandwidth


def test_stieltjes_left_endpoint_sum():
    lvals = np.array([0.0, 0.0, 1.0, 1.0, 3.0])
    integrand = np.array([5.0, 7.0, 11.0, 13.0, 17.0])
    # jumps of 1 at step 1->2 and 2 at step 3->4
    assert lt.stieltjes_dL(integrand, lvals) == pytest.approx(
        7.0 * 1.0 + 13.0 * 2.0)


def test_stieltjes_rejects_decreasing_integrator():
    with pytest.raises(ValueError):
        lt.stieltjes_dL(np.ones(3), np.array([0.0, 1.0, 0.5]))


def test_localtime_curve_validation():
    with pytest.raises(ValueError):
        lt.LocalTimeCurve(0.0, np.array([0.1, 0.2]), "occupation")
    with pytest.raises(ValueError):
        lt.LocalTimeCurve(0.0, np.array([0.0, 0.2, 0.1]), "occupation")
