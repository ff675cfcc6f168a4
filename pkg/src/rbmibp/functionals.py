"""Random path functionals used by the Monte-Carlo experiments.

``g_eps_a``: the local-time-weighted centered squared smoothed derivative,
integrated against a compactly supported weight; ``g_eps_quadratic``: the
same centered square integrated in time over the admissible interior;
``psi_k``: exponential test functionals; plus the per-path pieces of the
integration-by-parts identities (sign form and reflected form).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import localtime
from .closedform import q_transform
from .kernels import (MollifierSpec, WidthBoundaryError, c_eps_discrete,
                      smoothed_derivative_grid)
from .quadrature import composite_gl, trapezoid_weights
from .spectral import SpectralBasis


# ---------------------------------------------------------------------------
# deterministic ingredients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """A weight h in C^2 with compact support in (0,1), with derivatives."""

    h: object
    dh: object
    d2h: object
    support: tuple[float, float]
    label: str = "h"

    def __post_init__(self):
        lo, hi = self.support
        if not (0.0 < lo < hi < 1.0):
            raise ValueError("support must be a subinterval of (0, 1)")

    def _masked(self, fn, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        lo, hi = self.support
        out = np.zeros_like(theta)
        inside = (theta > lo) & (theta < hi)
        out[inside] = fn(theta[inside])
        return out if out.ndim else float(out)

    def __call__(self, theta):
        return self._masked(self.h, theta)

    def deriv1(self, theta):
        return self._masked(self.dh, theta)

    def deriv2(self, theta):
        return self._masked(self.d2h, theta)

    @property
    def margin(self) -> float:
        lo, hi = self.support
        return min(lo, 1.0 - hi)


def bump_test_function(lo: float = 0.25, hi: float = 0.75) -> TestFunction:
    """Smooth bump exp(1 - 1/(1-u^2)) mapped onto [lo, hi]; C^infinity."""
    c = 2.0 / (hi - lo)

    def u_of(theta):
        return (2.0 * theta - lo - hi) / (hi - lo)

    def h(theta):
        u = u_of(theta)
        return np.exp(1.0 - 1.0 / (1.0 - u * u))

    def dh(theta):
        u = u_of(theta)
        s = 1.0 - u * u
        return h(theta) * (-2.0 * u / s**2) * c

    def d2h(theta):
        u = u_of(theta)
        s = 1.0 - u * u
        g1 = -2.0 * u / s**2
        g2 = -2.0 / s**2 - 8.0 * u * u / s**3
        return h(theta) * (g1 * g1 + g2) * c * c

    return TestFunction(h, dh, d2h, (lo, hi), label=f"bump[{lo},{hi}]")


def cubic_test_function(lo: float = 0.2, hi: float = 0.8) -> TestFunction:
    """((theta-lo)(hi-theta))^3, peak-normalized; C^2 across the edges."""
    pmax = ((hi - lo) / 2.0) ** 2

    def p(theta):
        return (theta - lo) * (hi - theta)

    def h(theta):
        return (p(theta) / pmax) ** 3

    def dh(theta):
        pp = lo + hi - 2.0 * theta
        return 3.0 * p(theta) ** 2 * pp / pmax**3

    def d2h(theta):
        pp = lo + hi - 2.0 * theta
        return (6.0 * p(theta) * pp**2 - 6.0 * p(theta) ** 2) / pmax**3

    return TestFunction(h, dh, d2h, (lo, hi), label=f"cubic[{lo},{hi}]")


@dataclass(frozen=True)
class ExpFunctional:
    """Exponential functional exp<., k> with the transform K = Qk attached.

    qform = <Qk, k> = int K'^2, so E[exp<B,k>] = exp(qform/2).
    """

    k: object
    K: object
    Kp: object
    qform: float
    label: str = "k"


def zero_exp_functional() -> ExpFunctional:
    z = lambda theta: np.zeros_like(np.asarray(theta, dtype=float))
    return ExpFunctional(z, z, z, 0.0, label="k=0")


def constant_exp_functional(c: float = 1.0) -> ExpFunctional:
    return ExpFunctional(
        lambda theta: np.full_like(np.asarray(theta, dtype=float), c),
        lambda theta: c * (np.asarray(theta, dtype=float)
                           - np.asarray(theta, dtype=float) ** 2 / 2.0),
        lambda theta: c * (1.0 - np.asarray(theta, dtype=float)),
        c * c / 3.0,
        label=f"k={c}",
    )


def eigenmode_exp_functional(i: int = 1, amp: float = 1.0) -> ExpFunctional:
    basis = SpectralBasis(i)
    lam = basis.lam[i - 1]
    freq = basis.freq[i - 1]

    def e(theta):
        return np.sqrt(2.0) * np.sin(freq * np.asarray(theta, dtype=float))

    def ed(theta):
        return (np.sqrt(2.0) * freq
                * np.cos(freq * np.asarray(theta, dtype=float)))

    return ExpFunctional(
        lambda theta: amp * e(theta),
        lambda theta: amp * e(theta) / lam,
        lambda theta: amp * ed(theta) / lam,
        amp * amp / lam,
        label=f"k={amp}*e{i}",
    )


def exp_functional_from_callable(k, label: str = "k") -> ExpFunctional:
    """Build the transform K = Qk numerically for an arbitrary continuous k."""
    K, Kp = q_transform(k)
    nodes, w = composite_gl(0.0, 1.0, panels=128, order=12)
    qform = float(np.sum(w * Kp(nodes) ** 2))
    return ExpFunctional(k, K, Kp, qform, label=label)


# ---------------------------------------------------------------------------
# path functionals (all batch-first: values has shape (M, n+1))
# ---------------------------------------------------------------------------

def psi_k_log(values: np.ndarray, ef: ExpFunctional) -> np.ndarray:
    """log Psi_k: trapezoid inner product <path, k> for each path."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    nodes = np.linspace(0.0, 1.0, n + 1)
    w = trapezoid_weights(n, 1.0 / n)
    return values @ (w * np.asarray(ef.k(nodes), dtype=float))


def psi_k(values: np.ndarray, ef: ExpFunctional) -> np.ndarray:
    """exp<path, k>, clipping the exponent to avoid overflow."""
    return np.exp(np.clip(psi_k_log(values, ef), -700.0, 700.0))


def _check_width(tf: TestFunction, spec: MollifierSpec) -> None:
    if spec.epsilon >= tf.margin:
        raise WidthBoundaryError(
            f"eps={spec.epsilon} >= support margin {tf.margin}"
        )


def centered_square(values: np.ndarray, spec: MollifierSpec):
    """(smoothed derivative)^2 minus its exact sampler variance, per node.

    The centering constant is the discrete one (variance of the grid-level
    smoothed derivative under the sampled Wiener measure), so the result has
    mean exactly zero at every valid node for every grid size.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    bdot, valid = smoothed_derivative_grid(values, spec)
    return bdot**2 - c_eps_discrete(spec, n), valid


def g_eps_a_batch(values: np.ndarray, tf: TestFunction, a: float,
                  spec: MollifierSpec, lt_method: str = "occupation",
                  delta: float | None = None) -> np.ndarray:
    """int h * (centered squared smoothed derivative) dL^a, per path."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    _check_width(tf, spec)
    n = values.shape[1] - 1
    spec.check_grid(1.0 / n)
    nodes = np.linspace(0.0, 1.0, n + 1)

    sq, valid = centered_square(values, spec)
    hvals = tf(nodes)
    if np.any(hvals[~valid] != 0.0):
        raise WidthBoundaryError("weight support leaks outside valid nodes")
    integrand = hvals * np.where(valid, sq, 0.0)

    if lt_method == "occupation":
        if delta is None:
            delta = n ** (-1.0 / 3.0)
        lvals = localtime.occupation_localtime_batch(values, a, delta)
    elif lt_method == "tanaka":
        lvals, _ = localtime.tanaka_localtime_batch(values, a)
    else:
        raise ValueError(f"unknown local time method {lt_method!r}")
    return localtime.stieltjes_dL_batch(integrand, lvals)


def g_eps_quadratic_batch(values: np.ndarray,
                          spec: MollifierSpec) -> np.ndarray:
    """int over [eps, 1-eps] of the centered squared smoothed derivative."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    spec.check_grid(1.0 / n)
    sq, valid = centered_square(values, spec)
    # left-endpoint Riemann sum over the admissible interior
    mask = valid[:-1]
    return np.sum(sq[:, :-1][:, mask], axis=1) / n


# ---------------------------------------------------------------------------
# integration-by-parts assemblies
# ---------------------------------------------------------------------------

def ibp_lhs_sign_values(values: np.ndarray, tf: TestFunction,
                        ef: ExpFunctional, a: float) -> np.ndarray:
    """Per-path Psi_k(B) * int k h sign(B - a) dtheta (directional
    derivative of the exponential functional along h*sign(B-a))."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    nodes = np.linspace(0.0, 1.0, n + 1)
    w = trapezoid_weights(n, 1.0 / n)
    sgn = localtime.sign_convention(values - a)
    integ = sgn @ (w * np.asarray(ef.k(nodes), dtype=float) * tf(nodes))
    return psi_k(values, ef) * integ


def ibp_curvature_values(values: np.ndarray, tf: TestFunction,
                         ef: ExpFunctional, a: float) -> np.ndarray:
    """Per-path Psi_k(B) * int h'' |B - a| dtheta."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    nodes = np.linspace(0.0, 1.0, n + 1)
    w = trapezoid_weights(n, 1.0 / n)
    integ = np.abs(values - a) @ (w * tf.deriv2(nodes))
    return psi_k(values, ef) * integ


@dataclass
class IbpSample:
    """Per-path pieces of the integration-by-parts identity; each field is
    an (M,) array.  rhs = -curvature + local."""

    lhs: np.ndarray
    curvature: np.ndarray
    local: np.ndarray

    @property
    def rhs(self) -> np.ndarray:
        return -self.curvature + self.local


def ibp_sign_sample(values: np.ndarray, tf: TestFunction, ef: ExpFunctional,
                    a: float, spec: MollifierSpec,
                    delta: float | None = None) -> IbpSample:
    """Sign-form identity with F(z) = Psi_k(|z - a|): the directional
    derivative along h*sign cancels the sign, and the local-time term is
    2 * G_{eps,a} built from the symmetric-window local time of B at a."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    if delta is None:
        delta = n ** (-1.0 / 3.0)
    x = np.abs(values - a)
    psi = psi_k(x, ef)

    nodes = np.linspace(0.0, 1.0, n + 1)
    w = trapezoid_weights(n, 1.0 / n)
    kh = w * np.asarray(ef.k(nodes), dtype=float) * tf(nodes)
    sgn = localtime.sign_convention(values - a)
    # gradient of z -> Psi_k(|z-a|) paired with h*sign(z-a): sign^2 = 1
    lhs = psi * ((sgn * sgn) @ kh)

    curv = psi * (x @ (w * tf.deriv2(nodes)))

    sq, valid = centered_square(values, spec)
    integrand = tf(nodes) * np.where(valid, sq, 0.0)
    lvals = localtime.occupation_localtime_batch(values, a, delta)
    local = 2.0 * psi * localtime.stieltjes_dL_batch(integrand, lvals)
    return IbpSample(lhs, curv, local)


def ibp_rbm_sample(values: np.ndarray, tf: TestFunction, ef: ExpFunctional,
                   a: float, spec: MollifierSpec,
                   delta: float | None = None) -> IbpSample:
    """Reflected-path identity on X = |B - a| with the boundary local time
    of X at 0 (one-sided occupation window), pathwise identical to
    ibp_sign_sample on the same paths."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    if delta is None:
        delta = n ** (-1.0 / 3.0)
    x = np.abs(values - a)
    psi = psi_k(x, ef)

    nodes = np.linspace(0.0, 1.0, n + 1)
    w = trapezoid_weights(n, 1.0 / n)
    # direct directional derivative of f = Psi_k along h; evaluated as the
    # same inner product as the sign route (with the sign squared away) so
    # the two assemblies agree to the bit
    kh = w * np.asarray(ef.k(nodes), dtype=float) * tf(nodes)
    lhs = psi * (np.ones_like(values) @ kh)

    curv = psi * (x @ (w * tf.deriv2(nodes)))

    sq, valid = centered_square(values, spec)
    integrand = tf(nodes) * np.where(valid, sq, 0.0)
    ell0 = localtime.occupation_localtime_batch(x, 0.0, delta,
                                               one_sided=True)
    local = psi * localtime.stieltjes_dL_batch(integrand, ell0)
    return IbpSample(lhs, curv, local)


def shift_field(grid_n: int, support: tuple[float, float]) -> np.ndarray:
    """A piecewise-linear profile that is 0 at time 0 and identically 1 on
    [lo/2, 1]; adding a*profile to a path shifts it by a on [lo, hi] and on
    a full kernel width around it (for any admissible kernel width), so the
    level-a functional of the shifted path equals the level-0 functional of
    the original path exactly."""
    nodes = np.linspace(0.0, 1.0, grid_n + 1)
    lo = support[0]
    return np.clip(2.0 * nodes / lo, 0.0, 1.0)
