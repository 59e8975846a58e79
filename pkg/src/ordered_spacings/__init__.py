"""Exact and validated laws of ordered uniform spacings and their partial sums.

Statistics of ``n`` iid U(0, 1) samples: the k-th smallest spacing, the sum
of the k smallest spacings and the sum of the k largest, with the interval
ends counted as data (``n + 1`` spacings) or not (``n - 1`` inner spacings).
"""

from .coefficients import (
    CoefficientTable,
    SignedLog,
    coeff_A,
    coeff_a,
    coefficient_table,
    verify_recursions,
)
from .distribution import get_distribution
from .errors import DegenerateDistributionError, DomainError, PrecisionError
from .inference import TestResult, evaluate_data, quantile, quantiles
from .model import BoundaryMode, Family, SpacingModel, StatKind
from .montecarlo import SampleBatch, draw_statistic, ks_distance, statistic_from_values
from .series import EvalPolicy, PiecewiseSeries, PointMass, SeriesDistribution

__all__ = [
    "BoundaryMode",
    "CoefficientTable",
    "DegenerateDistributionError",
    "DomainError",
    "EvalPolicy",
    "Family",
    "PiecewiseSeries",
    "PointMass",
    "PrecisionError",
    "SampleBatch",
    "SeriesDistribution",
    "SignedLog",
    "SpacingModel",
    "StatKind",
    "TestResult",
    "coeff_A",
    "coeff_a",
    "coefficient_table",
    "draw_statistic",
    "evaluate_data",
    "get_distribution",
    "ks_distance",
    "quantile",
    "quantiles",
    "statistic_from_values",
    "verify_recursions",
]

__version__ = "0.1.0"
