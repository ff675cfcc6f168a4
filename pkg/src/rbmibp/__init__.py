"""Numerical verification toolkit for renormalized squared-derivative
functionals of Brownian paths integrated against local time.

The package builds the regularized functionals by mollification, estimates
their expectations by Monte Carlo, and checks limits and identities against
deterministic closed forms (Gaussian quadrature and eigenfunction series).
"""

from .functionals import (ExpFunctional, TestFunction, bump_test_function,
                          constant_exp_functional, cubic_test_function,
                          eigenmode_exp_functional, zero_exp_functional)
from .harness import EXPERIMENTS, ExperimentConfig, ExperimentReport
from .kernels import MollifierSpec
from .paths import Grid, Path
from .spectral import SpectralBasis

__all__ = [
    "ExpFunctional", "TestFunction", "bump_test_function",
    "constant_exp_functional", "cubic_test_function",
    "eigenmode_exp_functional", "zero_exp_functional",
    "EXPERIMENTS", "ExperimentConfig", "ExperimentReport",
    "MollifierSpec", "Grid", "Path", "SpectralBasis",
]

__version__ = "0.1.0"
