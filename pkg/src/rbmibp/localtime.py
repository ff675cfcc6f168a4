"""Local time estimation and Stieltjes integration against it.

Two estimators are provided and cross-validated: the occupation-density
estimator (time spent in a small window around the level, divided by the
window width) and the discrete Tanaka estimator (the drift part left over
after removing the sign-martingale from |B - a|).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def sign_convention(x):
    """sign(x) = 1 on (0, inf), -1 on (-inf, 0]."""
    return np.where(np.asarray(x) > 0.0, 1.0, -1.0)


@dataclass
class LocalTimeCurve:
    """Estimated cumulative local time at a level, one value per grid node."""

    level: float
    values: np.ndarray
    method: str
    bandwidth: float | None = None
    monotone_correction: float = 0.0
    coarse_bandwidth: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values[0] != 0.0:
            raise ValueError("local time starts at 0")
        if np.any(np.diff(self.values) < 0):
            raise ValueError("local time must be nondecreasing")


def occupation_localtime(path, a: float, delta: float,
                         one_sided: bool = False) -> LocalTimeCurve:
    """Occupation-density estimate of the local time of a path at level a.

    The symmetric window (a-delta, a+delta) with 1/(2 delta) normalization
    estimates the local time of Brownian motion; for a nonnegative path at
    its boundary level, ``one_sided`` switches to the window [a, a+delta)
    with 1/delta normalization, which estimates the boundary local time
    (twice the symmetric value when the path never enters (a-delta, a)).
    """
    values = _path_values(path)
    curve = occupation_localtime_batch(values[None, :], a, delta,
                                       one_sided=one_sided)[0]
    n = values.shape[0] - 1
    coarse = delta < 2.0 * np.sqrt(1.0 / n)
    return LocalTimeCurve(a, curve, "occupation", bandwidth=delta,
                          coarse_bandwidth=coarse)


def occupation_localtime_batch(values: np.ndarray, a: float, delta: float,
                               one_sided: bool = False) -> np.ndarray:
    if delta <= 0:
        raise ValueError("bandwidth must be positive")
    values = np.atleast_2d(np.asarray(values, dtype=float))
    m, np1 = values.shape
    n = np1 - 1
    left = values[:, :-1]
    if one_sided:
        ind = (left >= a) & (left < a + delta)
        norm = delta
    else:
        ind = np.abs(left - a) < delta
        norm = 2.0 * delta
    out = np.zeros((m, np1))
    np.cumsum(ind / (norm * n), axis=1, out=out[:, 1:])
    return out


def tanaka_localtime(path, a: float) -> LocalTimeCurve:
    """Discrete Tanaka estimate |B-a| - |a| - sum sign(B-a) dB, monotonized
    by running maximum; the size of the correction is kept as a diagnostic."""
    values = _path_values(path)
    raw = _tanaka_values(values[None, :], a)[0]
    mono = np.maximum.accumulate(raw)
    return LocalTimeCurve(a, mono, "tanaka",
                          monotone_correction=float(np.max(mono - raw)))


def tanaka_localtime_batch(values: np.ndarray, a: float):
    """Batch Tanaka estimates; returns (curves, corrections)."""
    raw = _tanaka_values(np.atleast_2d(values), a)
    mono = np.maximum.accumulate(raw, axis=1)
    return mono, np.max(mono - raw, axis=1)


def _tanaka_values(values: np.ndarray, a: float) -> np.ndarray:
    db = np.diff(values, axis=1)
    sgn = sign_convention(values[:, :-1] - a)
    raw = np.abs(values - a) - abs(a)
    raw[:, 1:] -= np.cumsum(sgn * db, axis=1)
    raw[:, 0] = 0.0
    return raw


def _path_values(path) -> np.ndarray:
    return np.asarray(getattr(path, "values", path), dtype=float)


def stieltjes_dL(integrand, L) -> float:
    """sum_j integrand(theta_j) * (L_{j+1} - L_j)."""
    integrand = np.asarray(integrand, dtype=float)
    lvals = np.asarray(getattr(L, "values", L), dtype=float)
    if integrand.shape != lvals.shape:
        raise ValueError("integrand and local time must share the grid")
    dl = np.diff(lvals)
    if np.any(dl < 0):
        raise ValueError("integrator is not nondecreasing")
    return float(np.sum(integrand[:-1] * dl))


def stieltjes_dL_batch(integrand: np.ndarray, lvals: np.ndarray) -> np.ndarray:
    return np.sum(integrand[:, :-1] * np.diff(lvals, axis=1), axis=1)
