"""Ornstein-Uhlenbeck semigroup applied to the regularized functional.

``ptG_eps`` evaluates the explicit deterministic formula for the semigroup
at time t acting on the level-0 functional G_eps; ``mehler_mc`` is its
Monte-Carlo oracle (average G_eps over the evolved field plus an
independent Gaussian fluctuation); ``ptG_norm`` estimates the squared
L2-norm under the stationary measure, used in the small-t decay study;
``expc_decay`` fits the large-t exponential convergence rate for
exponential functionals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import localtime
from .functionals import ExpFunctional, TestFunction
from .kernels import MollifierSpec, WidthBoundaryError
from .paths import Grid, Path, spectral_coefficients
from .quadrature import composite_gl
from .spectral import SpectralBasis


def attenuation(spec: MollifierSpec, basis: SpectralBasis) -> np.ndarray:
    """Per-mode damping of smoothing: convolving e_i (or e_i') with the
    width-eps kernel multiplies it by r_i = int rho(v) cos(sqrt(lambda_i)
    eps v) dv."""
    nodes, w = composite_gl(-1.0, 1.0, panels=96, order=12)
    rho = spec.rho(nodes)
    return np.cos(np.outer(basis.freq * spec.epsilon, nodes)) @ (w * rho)


def c_eps_series(spec: MollifierSpec, basis: SpectralBasis, theta):
    """Spectral form of the renormalization constant:
    sum_i r_i^2 e_i'(theta)^2 / lambda_i (truncated at basis.N)."""
    r = attenuation(spec, basis)
    ed = basis.evaluate_deriv(theta)
    return np.squeeze((ed**2) @ (r**2 / basis.lam))


def c_eps_t(spec: MollifierSpec, basis: SpectralBasis, theta, t: float):
    """sum_i exp(-lambda_i t) r_i^2 e_i'(theta)^2 / lambda_i."""
    if t <= 0:
        raise ValueError("t must be positive")
    r = attenuation(spec, basis)
    ed = basis.evaluate_deriv(theta)
    return np.squeeze((ed**2) @ (np.exp(-basis.lam * t) * r**2 / basis.lam))


def nu_eps(spec: MollifierSpec, basis: SpectralBasis, theta, t: float):
    """Smoothed slope of the time-t covariance at the diagonal:
    1/2 - sum_i exp(-lambda_i t) r_i e_i'(theta) e_i(theta) / lambda_i."""
    if t <= 0:
        raise ValueError("t must be positive")
    r = attenuation(spec, basis)
    e = basis.evaluate(theta)
    ed = basis.evaluate_deriv(theta)
    return np.squeeze(0.5 - (e * ed) @ (np.exp(-basis.lam * t)
                                        * r / basis.lam))


@dataclass(frozen=True)
class PtGEvaluation:
    """One deterministic semigroup evaluation; ``components`` records the
    four bracketed terms (squared slope, variance subtraction, cross term,
    local-time curvature term) whose sum is ``value``."""

    t: float
    epsilon: float
    value: float
    components: tuple[float, float, float, float]


class _PtGTables:
    """Quadrature nodes and spectral tables shared by all evaluations at a
    fixed (t, weight, kernel, truncation)."""

    def __init__(self, t: float, tf: TestFunction, spec: MollifierSpec,
                 basis: SpectralBasis, panels: int = 64, order: int = 8):
        if t <= 0:
            raise ValueError("t must be positive")
        if np.exp(-basis.lam[-1] * t) > 1e-8:
            raise ValueError(
                "t too small: the highest retained mode has not decayed, "
                "so the truncated covariance q_t is unresolved"
            )
        if spec.epsilon >= tf.margin:
            raise WidthBoundaryError(
                f"eps={spec.epsilon} >= support margin {tf.margin}"
            )
        lo, hi = tf.support
        self.t = t
        nodes, w = composite_gl(lo, hi, panels=panels, order=order)
        self.nodes = nodes
        self.hw = w * tf(nodes)
        self.e = basis.evaluate(nodes)
        self.ed = basis.evaluate_deriv(nodes)
        self.decay = np.exp(-basis.lam * t / 2.0)
        r = attenuation(spec, basis)
        self.r = r
        lam = basis.lam
        elam = np.exp(-lam * t)
        self.q = nodes - (self.e**2) @ (elam / lam)
        if np.min(self.q) < 1e-12:
            raise ValueError("t too small: covariance q_t underflows")
        self.ct = (self.ed**2) @ (elam * r**2 / lam)
        nu = 0.5 - (self.e * self.ed) @ (elam * r / lam)
        self.lslope = nu / self.q

    def evaluate(self, coeff: np.ndarray) -> np.ndarray:
        """Batch evaluation from spectral coefficients (M, N); returns the
        four integral components as an (M, 4) array."""
        coeff = np.atleast_2d(coeff)
        zt = coeff @ (self.decay[:, None] * self.e.T)
        dzt = coeff @ (self.decay[:, None] * self.r[:, None] * self.ed.T)
        weight = np.exp(-zt**2 / (2.0 * self.q)) / np.sqrt(
            2.0 * np.pi * self.q)
        base = self.hw * weight
        comp = np.empty((coeff.shape[0], 4))
        comp[:, 0] = np.sum(base * dzt**2, axis=1)
        comp[:, 1] = -np.sum(base * self.ct, axis=1)
        comp[:, 2] = -np.sum(base * 2.0 * zt * self.lslope * dzt, axis=1)
        comp[:, 3] = np.sum(base * (zt**2 - self.q) * self.lslope**2,
                            axis=1)
        return comp


def ptG_eps(z: Path, t: float, tf: TestFunction, spec: MollifierSpec,
            basis: SpectralBasis, panels: int = 64) -> PtGEvaluation:
    """Deterministic value of the time-t semigroup applied to the level-0
    functional, evaluated at the path z."""
    tables = _PtGTables(t, tf, spec, basis, panels=panels)
    coeff = spectral_coefficients(z.values, z.grid, basis)
    comp = tables.evaluate(coeff)[0]
    return PtGEvaluation(t, spec.epsilon, float(np.sum(comp)),
                         tuple(float(c) for c in comp))


def ptG_norm(t: float, tf: TestFunction, spec: MollifierSpec,
             m_samples: int, rng: np.random.Generator,
             basis: SpectralBasis, batch: int = 2000):
    """MC estimate of E_mu[(P_t G_eps)^2] with stationary spectral samples.

    Returns (estimate, stderr).
    """
    tables = _PtGTables(t, tf, spec, basis)
    inv_sqrt_lam = 1.0 / np.sqrt(basis.lam)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < m_samples:
        m = min(batch, m_samples - done)
        coeff = rng.standard_normal((m, basis.N)) * inv_sqrt_lam
        vals = np.sum(tables.evaluate(coeff), axis=1)
        sq = vals**2
        total += float(np.sum(sq))
        total_sq += float(np.sum(sq**2))
        done += m
    mean = total / m_samples
    var = max(total_sq / m_samples - mean**2, 0.0)
    return mean, np.sqrt(var / m_samples)


def mehler_mc(z: Path, t: float, tf: TestFunction, spec: MollifierSpec,
              basis: SpectralBasis, m_samples: int,
              rng: np.random.Generator, delta: float | None = None,
              batch: int = 1000):
    """Monte-Carlo oracle for ptG_eps: average of the level-0 functional
    over u = (heat-evolved z) + v, with v the time-t Gaussian fluctuation.

    The smoothed derivative of u is computed spectrally (exact per mode up
    to the truncation), the local time of u at 0 by the symmetric
    occupation window, and the centering constant by the same truncated
    series used in ptG_eps, so oracle and formula share their truncation.
    Returns (estimate, stderr).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    grid = z.grid
    n = grid.n
    if delta is None:
        delta = n ** (-1.0 / 3.0)
    nodes = grid.nodes
    e = basis.evaluate(nodes)
    ed = basis.evaluate_deriv(nodes)
    r = attenuation(spec, basis)
    lam = basis.lam
    decay = np.exp(-lam * t / 2.0)
    vstd = np.sqrt((1.0 - np.exp(-lam * t)) / lam)

    zcoeff = spectral_coefficients(z.values, grid, basis)[0]
    zt_nodes = e @ (decay * zcoeff)
    dzt_nodes = ed @ (decay * r * zcoeff)
    ceps = (ed**2) @ (r**2 / lam)
    hvals = tf(nodes)

    total = 0.0
    total_sq = 0.0
    done = 0
    while done < m_samples:
        m = min(batch, m_samples - done)
        xi = rng.standard_normal((m, basis.N))
        u = zt_nodes + (xi * vstd) @ e.T
        du = dzt_nodes + (xi * vstd * r) @ ed.T
        integrand = hvals * (du**2 - ceps)
        lvals = localtime.occupation_localtime_batch(u, 0.0, delta)
        vals = localtime.stieltjes_dL_batch(integrand, lvals)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals**2))
        done += m
    mean = total / m_samples
    var = max(total_sq / m_samples - mean**2, 0.0)
    return mean, np.sqrt(var / m_samples)


# ---------------------------------------------------------------------------
# exponential convergence of the semigroup on exponential functionals
# ---------------------------------------------------------------------------

def _mode_coefficients(ef: ExpFunctional, basis: SpectralBasis) -> np.ndarray:
    nodes, w = composite_gl(0.0, 1.0, panels=128, order=12)
    kv = np.asarray(ef.k(nodes), dtype=float)
    return basis.evaluate(nodes).T @ (w * kv)


def pt_psi_values(zcoeff: np.ndarray, ef: ExpFunctional, t: float,
                  basis: SpectralBasis) -> np.ndarray:
    """Closed-form semigroup action on the exponential functional:
    P_t Psi_k(z) = exp(<z, e^{tA}k> + <Q_t k, k>/2)."""
    kmode = _mode_coefficients(ef, basis)
    lam = basis.lam
    kt = np.exp(-lam * t / 2.0) * kmode
    qt_form = float(np.sum(kmode**2 * (1.0 - np.exp(-lam * t)) / lam))
    return np.exp(np.atleast_2d(zcoeff) @ kt + 0.5 * qt_form)


def expc_norm_sq_exact(ef: ExpFunctional, t: float,
                       basis: SpectralBasis) -> float:
    """Exact E_mu[(P_t Psi_k - mu(Psi_k))^2] by Gaussian moments."""
    kmode = _mode_coefficients(ef, basis)
    lam = basis.lam
    kt = np.exp(-lam * t / 2.0) * kmode
    qt_form = float(np.sum(kmode**2 * (1.0 - np.exp(-lam * t)) / lam))
    qkt = float(np.sum(kt**2 / lam))
    mu = np.exp(0.5 * float(np.sum(kmode**2 / lam)))
    second = np.exp(qt_form + 2.0 * qkt)
    return float(second - mu * mu)


def expc_decay(ef: ExpFunctional, t_grid, m_samples: int,
               rng: np.random.Generator, basis: SpectralBasis):
    """MC estimates of the centered squared norm of P_t Psi_k over t_grid
    and the fitted exponential rate (slope of -log norm vs t).

    Returns (estimates, stderrs, fitted_rate).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    inv_sqrt_lam = 1.0 / np.sqrt(basis.lam)
    zc = rng.standard_normal((m_samples, basis.N)) * inv_sqrt_lam
    mu = np.exp(0.5 * float(np.sum(_mode_coefficients(ef, basis) ** 2
                                   / basis.lam)))
    estimates = np.empty_like(t_grid)
    stderrs = np.empty_like(t_grid)
    for j, t in enumerate(t_grid):
        dev = (pt_psi_values(zc, ef, t, basis) - mu) ** 2
        estimates[j] = np.mean(dev)
        stderrs[j] = np.std(dev, ddof=1) / np.sqrt(m_samples)
    if np.all(estimates > 0.0):
        slope = np.polyfit(t_grid, np.log(estimates), 1)[0]
        rate = float(-slope)
    else:  # degenerate functional: nothing decays
        rate = float("inf")
    return estimates, stderrs, rate
