"""Closed-form targets: Laplace transform, mean formula, integration-by-parts
right- and left-hand sides, heat-kernel covariances and the resolvent
integrand.  Everything here is deterministic quadrature or spectral series;
the Monte-Carlo estimates in the harness are checked against these values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import ndtr

from .quadrature import composite_gl
from .spectral import SpectralBasis


def lambda_fn(theta: float, x: float, y: float) -> float:
    """x^2 + x*y/theta + (y^2 - theta) / (4 theta^2)."""
    if theta <= 0.0:
        raise ValueError("theta must be positive")
    return x * x + x * y / theta + (y * y - theta) / (4.0 * theta * theta)


def folded_normal_mean(mu, sigma):
    """E|X| for X ~ N(mu, sigma^2)."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return (sigma * np.sqrt(2.0 / np.pi) * np.exp(-mu**2 / (2.0 * sigma**2))
            + mu * (1.0 - 2.0 * ndtr(-mu / sigma)))


def q_transform(k, npts: int = 8192):
    """K = Qk and K' for a callable k on [0, 1], by quadrature.

    K'(theta) = int_theta^1 k and K is its antiderivative with K(0) = 0,
    so K(0) = 0 and K'(1) = 0 hold by construction.
    """
    grid = np.linspace(0.0, 1.0, npts + 1)
    kv = np.asarray(k(grid), dtype=float)
    dx = 1.0 / npts
    # reversed cumulative trapezoid for the tail integral
    seg = 0.5 * (kv[:-1] + kv[1:]) * dx
    kp = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    seg2 = 0.5 * (kp[:-1] + kp[1:]) * dx
    kk = np.concatenate([[0.0], np.cumsum(seg2)])

    def K(theta):
        return np.interp(theta, grid, kk)

    def Kp(theta):
        return np.interp(theta, grid, kp)

    return K, Kp


def support_rule(h, panels: int = 96, order: int = 12):
    """Shared quadrature nodes/weights on the support of a test function."""
    lo, hi = h.support
    return composite_gl(lo, hi, panels=panels, order=order)


def laplace_rhs(h, ef, a: float, panels: int = 96) -> float:
    """Closed form of the exponential-functional pairing with the
    renormalized quadratic local-time functional:

    exp(<Qk,k>/2) int h(t) * N(a; K(t), t) * lambda(t, K'(t), a - K(t)) dt
    """
    nodes, w = support_rule(h, panels=panels)
    kk = ef.K(nodes)
    kp = ef.Kp(nodes)
    y = a - kk
    lam = kp**2 + kp * y / nodes + (y**2 - nodes) / (4.0 * nodes**2)
    dens = np.exp(-y**2 / (2.0 * nodes)) / np.sqrt(2.0 * np.pi * nodes)
    return float(np.exp(0.5 * ef.qform) * np.sum(w * h(nodes) * dens * lam))


def mean_G(h, a: float, panels: int = 96) -> float:
    """int h(t) (a^2 - t)/(4 t^2) * N(a; 0, t) dt — the mean of the
    regularized functional, independent of the smoothing width."""
    nodes, w = support_rule(h, panels=panels)
    lam = (a * a - nodes) / (4.0 * nodes**2)
    dens = np.exp(-a * a / (2.0 * nodes)) / np.sqrt(2.0 * np.pi * nodes)
    return float(np.sum(w * h(nodes) * dens * lam))


def ibp_lhs_sign(h, ef, a: float, panels: int = 96) -> float:
    """exp(<Qk,k>/2) int h k (1 - 2 Phi((a - K)/sqrt(t))) dt."""
    nodes, w = support_rule(h, panels=panels)
    e_sign = 1.0 - 2.0 * ndtr((a - ef.K(nodes)) / np.sqrt(nodes))
    return float(np.exp(0.5 * ef.qform)
                 * np.sum(w * h(nodes) * ef.k(nodes) * e_sign))


def ibp_rhs_sign(h, ef, a: float, panels: int = 96) -> float:
    """-exp(<Qk,k>/2) int h'' E|N(K,t) - a| dt  +  2 * laplace_rhs."""
    nodes, w = support_rule(h, panels=panels)
    fold = folded_normal_mean(ef.K(nodes) - a, np.sqrt(nodes))
    curv = float(np.exp(0.5 * ef.qform) * np.sum(w * h.d2h(nodes) * fold))
    return -curv + 2.0 * laplace_rhs(h, ef, a, panels=panels)


def quadratic_rhs(ef, panels: int = 256) -> float:
    """exp(<Qk,k>/2) int_0^1 K'(t)^2 dt."""
    nodes, w = composite_gl(0.0, 1.0, panels=panels, order=12)
    return float(np.exp(0.5 * ef.qform) * np.sum(w * ef.Kp(nodes) ** 2))


# ---------------------------------------------------------------------------
# covariances of the stochastic convolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CovarianceBundle:
    """Series evaluations of q_t, its complement q^t and the heat kernel g_t
    at a common time t and truncation level N."""

    t: float
    N: int

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be nonnegative")

    @cached_property
    def basis(self) -> SpectralBasis:
        return SpectralBasis(self.N)

    def q_t(self, theta, theta_p):
        lam = self.basis.lam
        e1 = self.basis.evaluate(theta)
        e2 = self.basis.evaluate(theta_p)
        coef = (1.0 - np.exp(-lam * self.t)) / lam
        return np.squeeze(np.einsum("ai,i,bi->ab", e1, coef, e2))

    def q_upper(self, theta, theta_p):
        """Independent series for q^t = min - q_t."""
        lam = self.basis.lam
        e1 = self.basis.evaluate(theta)
        e2 = self.basis.evaluate(theta_p)
        coef = np.exp(-lam * self.t) / lam
        return np.squeeze(np.einsum("ai,i,bi->ab", e1, coef, e2))

    def q_t_diag(self, theta):
        """q_t(theta) = theta - q^t(theta); converges fast for t > 0."""
        lam = self.basis.lam
        e1 = self.basis.evaluate(theta)
        tail = (e1**2) @ (np.exp(-lam * self.t) / lam)
        return np.squeeze(np.atleast_1d(np.asarray(theta, float)) - tail)

    def g_t(self, theta, theta_p):
        if self.t <= 0:
            raise ValueError("heat kernel needs t > 0")
        lam = self.basis.lam
        e1 = self.basis.evaluate(theta)
        e2 = self.basis.evaluate(theta_p)
        coef = np.exp(-lam * self.t / 2.0)
        return np.squeeze(np.einsum("ai,i,bi->ab", e1, coef, e2))

    def tail_bound(self) -> float:
        return self.basis.tail_bound()


def covariances(t: float, N: int) -> CovarianceBundle:
    return CovarianceBundle(t, N)


def c_t0(theta, t: float, N: int):
    """sum_i exp(-lambda_i t) e_i'(theta)^2 / lambda_i."""
    if t <= 0:
        raise ValueError("series diverges at t = 0")
    basis = SpectralBasis(N)
    ed = basis.evaluate_deriv(theta)
    return np.squeeze((ed**2) @ (np.exp(-basis.lam * t) / basis.lam))


def nu0(theta, t: float, N: int):
    """1/2 - sum_i exp(-lambda_i t) e_i'(theta) e_i(theta) / lambda_i."""
    if t <= 0:
        raise ValueError("series diverges at t = 0")
    basis = SpectralBasis(N)
    e = basis.evaluate(theta)
    ed = basis.evaluate_deriv(theta)
    return np.squeeze(0.5 - (e * ed) @ (np.exp(-basis.lam * t) / basis.lam))


def rg0_integrand(z_field, t: float, theta, h, N: int):
    """Bracketed integrand of the resolvent representation at (t, theta):
    the Gaussian-weighted combination of the heat-evolved field, its
    derivative, c^t_0 and nu_0, multiplied by h(theta)."""
    from .paths import spectral_coefficients

    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    basis = SpectralBasis(N)
    coeff = spectral_coefficients(z_field.values, z_field.grid, basis)[0]
    decay = np.exp(-basis.lam * t / 2.0)
    e = basis.evaluate(theta)
    ed = basis.evaluate_deriv(theta)
    zt = e @ (decay * coeff)
    dzt = ed @ (decay * coeff)

    q = covariances(t, N).q_t_diag(theta)
    q = np.atleast_1d(q)
    ct = np.atleast_1d(c_t0(theta, t, N))
    nu = np.atleast_1d(nu0(theta, t, N))
    weight = np.exp(-zt**2 / (2.0 * q)) / np.sqrt(2.0 * np.pi * q)
    bracket = (dzt**2 - ct - 2.0 * nu * zt / q * dzt
               + nu**2 * ((zt / q) ** 2 - 1.0 / q))
    return np.squeeze(h(theta) * weight * bracket)
