"""Mollifier kernels, path smoothing and the renormalization constant.

A mollifier is a smooth symmetric probability density rho supported in
(-1, 1), rescaled to width eps as rho_eps(x) = rho(x/eps)/eps.  Sampled
paths are smoothed by convolution against rho_eps; the derivative of the
smoothed path is obtained by convolving against -rho_eps'.  The constant
``c_eps`` is the variance of that smoothed derivative under the Wiener
measure and is what gets subtracted to center the squared derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import oaconvolve

from .quadrature import cell_aligned_gl, composite_gl


class WidthBoundaryError(ValueError):
    """Mollifier width does not fit between theta and the interval ends."""


class GridTooCoarseError(ValueError):
    """Path grid step exceeds eps/10; the smoothed derivative would be
    dominated by grid noise."""


def _bump_raw(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi * xi))
    return out


def _bump_raw_deriv(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    s = 1.0 - xi * xi
    out[inside] = np.exp(-1.0 / s) * (-2.0 * xi / (s * s))
    return out


@lru_cache(maxsize=4)
def _bump_mass() -> float:
    nodes, weights = composite_gl(-1.0, 1.0, panels=64, order=12)
    return float(np.sum(weights * _bump_raw(nodes)))


def _epan_raw(x):
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = 1.0 - x[inside] ** 2
    return out


def _epan_raw_deriv(x):
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = -2.0 * x[inside]
    return out


# kernel_id -> (raw profile, raw derivative, total raw mass on (-1, 1))
_KERNELS = {
    "bump": (_bump_raw, _bump_raw_deriv, _bump_mass),
    "epanechnikov": (_epan_raw, _epan_raw_deriv, lambda: 4.0 / 3.0),
}


@dataclass(frozen=True)
class MollifierSpec:
    """Choice of smoothing kernel, its width and the quadrature budget.

    ``mass_convention`` selects the normalization of the profile:
    "full" normalizes the integral over all of R to 1 (the standard
    mollifier convention, and the one under which smoothing preserves
    constants); "half" normalizes the integral over (0, 1) to 1 instead,
    which doubles the density.
    """

    kernel_id: str = "bump"
    epsilon: float = 0.05
    quad_points: int = 512
    mass_convention: str = "full"

    def __post_init__(self):
        if self.kernel_id not in _KERNELS:
            raise ValueError(f"unknown kernel {self.kernel_id!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.quad_points < 8:
            raise ValueError("quad_points too small")
        if self.mass_convention not in ("full", "half"):
            raise ValueError("mass_convention must be 'full' or 'half'")

    @property
    def _norm(self) -> float:
        raw_mass = _KERNELS[self.kernel_id][2]()
        if self.mass_convention == "full":
            return 1.0 / raw_mass
        return 2.0 / raw_mass

    def rho(self, x):
        """Normalized profile on (-1, 1)."""
        x = np.asarray(x, dtype=float)
        return self._norm * _KERNELS[self.kernel_id][0](x)

    def rho_deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self._norm * _KERNELS[self.kernel_id][1](x)

    def rho_eps(self, x):
        """Width-eps density rho(x/eps)/eps."""
        x = np.asarray(x, dtype=float)
        return self.rho(x / self.epsilon) / self.epsilon

    def rho_eps_deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self.rho_deriv(x / self.epsilon) / self.epsilon**2

    def check_admissible(self, theta: float) -> None:
        if self.epsilon >= min(theta, 1.0 - theta):
            raise WidthBoundaryError(
                f"eps={self.epsilon} does not fit at theta={theta}"
            )

    def check_grid(self, grid_step: float) -> None:
        if grid_step > self.epsilon / 10.0 + 1e-15:
            raise GridTooCoarseError(
                f"grid step {grid_step} exceeds eps/10 = {self.epsilon / 10.0}"
            )


def _support_cells(spec: MollifierSpec, theta: float, grid_step: float):
    # Cell edges of the path grid covering [theta-eps, theta+eps].  Aligning
    # quadrature panels with the path cells keeps the piecewise-linear
    # interpolant exactly integrable (the kinks sit on panel boundaries).
    lo = math.floor((theta - spec.epsilon) / grid_step)
    hi = math.ceil((theta + spec.epsilon) / grid_step)
    edges = np.arange(lo, hi + 1, dtype=float) * grid_step
    ncells = hi - lo
    order = int(np.clip(math.ceil(spec.quad_points / max(ncells, 1)), 4, 16))
    return cell_aligned_gl(edges, order=order)


def _interp_path(path_samples: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    n = len(path_samples) - 1
    nodes = np.linspace(0.0, 1.0, n + 1)
    return np.interp(sigma, nodes, path_samples)


def mollify(path_samples, spec: MollifierSpec, theta: float) -> float:
    """(rho_eps * path)(theta) for a path sampled on the uniform grid."""
    path_samples = np.asarray(path_samples, dtype=float)
    n = len(path_samples) - 1
    grid_step = 1.0 / n
    spec.check_admissible(theta)
    spec.check_grid(grid_step)
    sigma, w = _support_cells(spec, theta, grid_step)
    vals = _interp_path(path_samples, sigma)
    return float(np.sum(w * spec.rho_eps(sigma - theta) * vals))


def mollified_derivative(path_samples, spec: MollifierSpec, theta: float) -> float:
    """Derivative of the smoothed path, (-rho_eps' * path)(theta)."""
    path_samples = np.asarray(path_samples, dtype=float)
    n = len(path_samples) - 1
    grid_step = 1.0 / n
    spec.check_admissible(theta)
    spec.check_grid(grid_step)
    sigma, w = _support_cells(spec, theta, grid_step)
    vals = _interp_path(path_samples, sigma)
    return float(-np.sum(w * spec.rho_eps_deriv(sigma - theta) * vals))


def mollified_derivative_fn(f, spec: MollifierSpec, theta: float,
                            order: int = 12, cells_per_side: int = 32) -> float:
    """(-rho_eps' * f)(theta) for a callable f, with panels aligned so that
    theta itself is a panel edge (f may have a kink there)."""
    spec.check_admissible(theta)
    eps = spec.epsilon
    edges = theta + np.linspace(-eps, eps, 2 * cells_per_side + 1)
    sigma, w = cell_aligned_gl(edges, order=order)
    return float(-np.sum(w * spec.rho_eps_deriv(sigma - theta) * f(sigma)))


def c_eps(spec: MollifierSpec, theta: float) -> float:
    """Renormalization constant <Q rho_eps'(.-theta), rho_eps'(.-theta)>.

    Double quadrature of min(sigma, sigma') against the kernel derivative,
    written in the rescaled variable sigma = theta + eps*u so the node set
    is independent of (eps, theta).
    """
    spec.check_admissible(theta)
    nq = spec.quad_points
    # midpoint nodes on (-1, 1); symmetric, so the odd rho' sums cancel
    u = -1.0 + (2.0 * np.arange(nq) + 1.0) / nq
    w = np.full(nq, 2.0 / nq)
    g = w * spec.rho_deriv(u)
    sigma = theta + spec.epsilon * u
    m = np.minimum(sigma[:, None], sigma[None, :])
    return float(g @ m @ g / spec.epsilon**2)


def l2_norm_sq(spec: MollifierSpec) -> float:
    """Integral of rho^2 over the support (unscaled profile)."""
    nodes, weights = composite_gl(-1.0, 1.0, panels=64, order=12)
    return float(np.sum(weights * spec.rho(nodes) ** 2))


# ---------------------------------------------------------------------------
# grid-resolution path smoothing used by the Monte-Carlo functionals
# ---------------------------------------------------------------------------

def stieltjes_taps(spec: MollifierSpec, n: int):
    """Kernel taps for the increment form of the smoothed derivative.

    Returns (taps, reach) with taps[i] = rho_eps((i - reach + 1/2) * h); the
    smoothed derivative at node j is sum_i taps[i] * dB[j + i - reach],
    i.e. the Stieltjes sum of rho_eps(. - theta_j) against path increments.
    """
    h = 1.0 / n
    spec.check_grid(h)
    reach = math.ceil(spec.epsilon / h)
    offsets = (np.arange(2 * reach) - reach + 0.5) * h
    return spec.rho_eps(offsets), reach


def smoothed_derivative_grid(values: np.ndarray, spec: MollifierSpec):
    """Smoothed derivative of a batch of sampled paths at every grid node.

    values has shape (M, n+1).  Returns (bdot, valid) where bdot has shape
    (M, n+1) and valid marks the nodes where the kernel support lies fully
    inside the sampled interval and eps < min(theta, 1-theta).
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    taps, reach = stieltjes_taps(spec, n)
    db = np.diff(values, axis=1)
    full = oaconvolve(db, taps[::-1][None, :], mode="full", axes=1)
    bdot = full[:, reach - 1: reach - 1 + n + 1]

    theta = np.linspace(0.0, 1.0, n + 1)
    valid = (theta > spec.epsilon) & (theta < 1.0 - spec.epsilon)
    j = np.arange(n + 1)
    valid &= (j - reach >= 0) & (j + reach - 1 <= n - 1)
    return bdot, valid


def c_eps_discrete(spec: MollifierSpec, n: int) -> float:
    """Exact variance of the grid-resolution smoothed derivative under the
    discrete Wiener sampler: h * sum(taps^2)."""
    taps, _ = stieltjes_taps(spec, n)
    return float(np.sum(taps**2) / n)
