"""Brownian path sampling on a uniform grid, spectral (Karhunen-Loeve)
sampling, and the deterministic heat-evolved field z(t, .)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .spectral import SpectralBasis


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, 1] with n intervals."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid needs at least 2 intervals")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    @property
    def step(self) -> float:
        return 1.0 / self.n


@dataclass
class Path:
    """A sampled path on a grid; values[0] = 0."""

    grid: Grid
    values: np.ndarray
    seed: object = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n + 1,):
            raise ValueError("values do not match the grid")
        if self.values[0] != 0.0:
            raise ValueError("paths start at 0")


def sample_bm(grid: Grid, rng: np.random.Generator, seed=None) -> Path:
    """One Brownian path: cumulative sums of N(0, 1/n) increments."""
    return Path(grid, _bm_values(grid, rng, 1)[0], seed=seed)


def sample_bm_batch(grid: Grid, rng: np.random.Generator, m: int) -> np.ndarray:
    """m Brownian paths as an (m, n+1) array."""
    return _bm_values(grid, rng, m)


def _bm_values(grid: Grid, rng: np.random.Generator, m: int) -> np.ndarray:
    inc = rng.normal(0.0, np.sqrt(grid.step), size=(m, grid.n))
    out = np.zeros((m, grid.n + 1))
    np.cumsum(inc, axis=1, out=out[:, 1:])
    return out


def sample_bm_spectral(n_modes: int, rng: np.random.Generator,
                       grid: Grid) -> Path:
    """Karhunen-Loeve truncation: B = sum_i xi_i lambda_i^{-1/2} e_i."""
    basis = SpectralBasis(n_modes)
    xi = rng.standard_normal(n_modes)
    e = basis.evaluate(grid.nodes)
    values = e @ (xi / np.sqrt(basis.lam))
    values[0] = 0.0
    return Path(grid, values)


def spectral_coefficients(values: np.ndarray, grid: Grid,
                          basis: SpectralBasis) -> np.ndarray:
    """Trapezoid inner products <z, e_i> for a path (or batch) on the grid."""
    e = basis.evaluate(grid.nodes)
    w = np.full(grid.n + 1, grid.step)
    w[0] = w[-1] = 0.5 * grid.step
    return np.atleast_2d(values) @ (w[:, None] * e)


def heat_evolve(path: Path, t: float, basis: SpectralBasis) -> np.ndarray:
    """The field z(t, .) on the grid: heat semigroup applied to the path,
    with absorbing condition at 0 and reflecting condition at 1."""
    if t <= 0:
        raise ValueError("t must be positive")
    if basis.N < 1:
        raise ValueError("need at least one mode")
    coeff = spectral_coefficients(path.values, path.grid, basis)[0]
    decay = np.exp(-basis.lam * t / 2.0)
    e = basis.evaluate(path.grid.nodes)
    return e @ (decay * coeff)


def sample_v_field(t: float, basis: SpectralBasis, rng: np.random.Generator,
                   grid: Grid) -> np.ndarray:
    """Centered Gaussian field with covariance q_t(theta, theta')."""
    if t <= 0:
        raise ValueError("t must be positive")
    return sample_v_field_batch(t, basis, rng, grid, 1)[0]


def sample_v_field_batch(t: float, basis: SpectralBasis,
                         rng: np.random.Generator, grid: Grid,
                         m: int) -> np.ndarray:
    xi = rng.standard_normal((m, basis.N))
    std = np.sqrt((1.0 - np.exp(-basis.lam * t)) / basis.lam)
    e = basis.evaluate(grid.nodes)
    return (xi * std) @ e.T
