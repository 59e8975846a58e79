"""Quantiles and two-tailed p-values for spacing statistics of data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .distribution import get_distribution
from .errors import DomainError
from .model import BoundaryMode, SpacingModel, StatKind, check_stat
from .montecarlo import statistic_from_values
from .series import EvalPolicy, PointMass

__all__ = ["TestResult", "quantile", "quantiles", "evaluate_data"]


@dataclass(frozen=True)
class TestResult:
    """Observed statistic with both tail probabilities.

    ``p_small = P[T <= observed]`` and ``p_large = P[T >= observed]``; for a
    continuous law they add to one, for the degenerate sums both are 1.
    """

    __test__ = False  # not a pytest class

    stat: StatKind
    observed: float
    p_small: float
    p_large: float
    n: int
    boundary_mode: BoundaryMode

    def to_dict(self) -> dict:
        return {
            "stat": {"family": self.stat.family.value, "k": self.stat.k},
            "observed": self.observed,
            "p_small": self.p_small,
            "p_large": self.p_large,
            "n": self.n,
            "boundary_mode": self.boundary_mode.value,
        }


def quantile(model: SpacingModel, stat: StatKind, p: float,
             policy: EvalPolicy | None = None) -> float:
    """Smallest-error root ``s`` of ``CDF(s) = p`` on the support.

    ``p = 0`` and ``p = 1`` return the support ends exactly.  The root is
    bracketed between consecutive breakpoints before Brent's method is run,
    so a failure to bracket means the CDF is not monotone and is raised as
    ``RuntimeError``.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability must lie in [0, 1], got {p!r}")
    d = get_distribution(model, stat)
    if isinstance(d, PointMass):
        return float(d.at)
    lo, hi = d.support
    if p == 0.0:
        return lo
    if p == 1.0:
        return hi

    def g(s: float) -> float:
        return float(d.cdf(s, policy)) - p

    grid = np.unique(np.concatenate([[lo, hi], d.breakpoints()]))
    vals = np.asarray([g(s) for s in grid])
    if np.any(np.diff(vals) < -1e-12):
        j = int(np.argmin(np.diff(vals)))
        raise RuntimeError(f"{d.name}: CDF decreases between {grid[j]!r} and {grid[j + 1]!r}")
    if vals[0] > 0 or vals[-1] < 0:
        raise RuntimeError(f"{d.name}: CDF does not bracket p={p!r} on its support")
    hit = np.flatnonzero(vals == 0)
    if hit.size:
        return float(grid[hit[0]])
    j = int(np.searchsorted(vals, 0.0))  # vals[j-1] < 0 < vals[j]
    a, b = grid[j - 1], grid[j]
    return float(brentq(g, a, b, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200))


def quantiles(model: SpacingModel, stat: StatKind, ps, policy: EvalPolicy | None = None) -> np.ndarray:
    return np.array([quantile(model, stat, p, policy) for p in np.ravel(ps)])


def evaluate_data(values, stat: StatKind,
                  boundary_mode: BoundaryMode | str = BoundaryMode.WITH_EDGES,
                  policy: EvalPolicy | None = None) -> TestResult:
    """Statistic of uniformised data and its two tail probabilities.

    ``values`` must already be mapped to [0, 1] (typically through the
    hypothesised CDF of the measurements).  Order does not matter; ties are
    allowed and give zero spacings.
    """
    x = np.asarray(values, dtype=float).ravel()
    bad = np.flatnonzero(~((x >= 0) & (x <= 1)))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"value at index {i} is {x[i]!r}; data must lie in [0, 1]")
    mode = BoundaryMode(boundary_mode)
    if mode is BoundaryMode.NO_EDGES and x.size < 3:
        raise DomainError(f"the no-edges statistics need at least 3 values, got {x.size}")
    if x.size < 1:
        raise DomainError("no data values")
    model = SpacingModel(int(x.size), mode)
    check_stat(model, stat)
    observed = float(statistic_from_values(x, model, stat)[0])
    d = get_distribution(model, stat)
    p_small = float(d.cdf(observed, policy))
    p_large = float(d.sf(observed, policy))
    if not (math.isfinite(p_small) and math.isfinite(p_large)):
        raise ArithmeticError("non-finite tail probability")
    return TestResult(stat, observed, p_small, p_large, model.n, mode)
