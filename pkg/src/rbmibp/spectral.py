"""Eigen-system of the half-Laplacian with absorbing/reflecting ends.

lambda_i = pi^2 (2i-1)^2 / 4 and e_i(theta) = sqrt(2) sin(sqrt(lambda_i)
theta) diagonalize the Brownian covariance operator, its generator and the
heat semigroup simultaneously; everything spectral in this package is built
from these arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


def eigenvalues(n_modes: int) -> np.ndarray:
    i = np.arange(1, n_modes + 1)
    return (np.pi**2 / 4.0) * (2 * i - 1) ** 2


@dataclass(frozen=True)
class SpectralBasis:
    """Truncated eigen-system; evaluation returns (len(theta), N) matrices."""

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("truncation level must be >= 1")

    @cached_property
    def lam(self) -> np.ndarray:
        return eigenvalues(self.N)

    @cached_property
    def freq(self) -> np.ndarray:
        return np.sqrt(self.lam)

    def evaluate(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return np.sqrt(2.0) * np.sin(np.outer(theta, self.freq))

    def evaluate_deriv(self, theta) -> np.ndarray:
        """Analytic derivative sqrt(2 lambda_i) cos(sqrt(lambda_i) theta)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return np.sqrt(2.0) * self.freq * np.cos(np.outer(theta, self.freq))

    def tail_bound(self) -> float:
        """Bound on sum_{i>N} 1/lambda_i (controls covariance truncation)."""
        return 2.0 / (np.pi**2 * (2 * self.N - 1))
