"""Spacing laws when 0 and 1 are counted as data (``n + 1`` spacings).

Series builders return exact :class:`PiecewiseSeries`; the ``*_pdf`` /
``*_cdf`` / ``*_sf`` functions evaluate the corresponding law for a
:class:`SpacingModel`.  A handful of closed forms for small ``k`` are kept
separately so the general series can be checked against them.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np

from .coefficients import coefficient_table
from .errors import DegenerateDistributionError, DomainError
from .model import Family, SpacingModel, StatKind, check_stat
from .series import EvalPolicy, PiecewiseSeries, PointMass, SeriesDistribution, Term

__all__ = [
    "single_spacing_pdf",
    "single_spacing_cdf",
    "smallest_spacing_pdf",
    "smallest_spacing_cdf",
    "two_smallest_sum_pdf",
    "kth_spacing_pdf_series",
    "kth_spacing_cdf_series",
    "sum_smallest_pdf_series",
    "sum_smallest_cdf_series",
    "sum_largest_pdf_series",
    "sum_largest_cdf_series",
    "sum_largest_sf_series",
    "kth_spacing_distribution",
    "sum_smallest_distribution",
    "sum_largest_distribution",
    "kth_spacing_pdf",
    "kth_spacing_cdf",
    "sum_smallest_pdf",
    "sum_smallest_cdf",
    "sum_largest_pdf",
    "sum_largest_pdf_direct",
    "sum_largest_cdf",
    "sum_largest_sf",
]


def _require_edges(model: SpacingModel) -> None:
    if not model.with_edges:
        raise DomainError("this law is for the with-edges model; see dist_noedges")


def _check_unit(x) -> None:
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any((xa < 0) | (xa > 1)):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")


# -- closed forms -----------------------------------------------------------
# These use plain arithmetic, so Fraction inputs give exact results.


def single_spacing_pdf(model: SpacingModel, x):
    """Density ``N (1-x)^(N-1)`` of any one (unordered) spacing."""
    _require_edges(model)
    _check_unit(x)
    n = model.n
    return n * (1 - x) ** (n - 1)


def single_spacing_cdf(model: SpacingModel, x):
    _require_edges(model)
    _check_unit(x)
    return 1 - (1 - x) ** model.n


def smallest_spacing_pdf(n: int, x):
    """Fisher's law of the smallest of ``n + 1`` spacings."""
    if x < 0 or x > Fraction(1, n + 1):
        return 0 * x
    return n * (n + 1) * (1 - (n + 1) * x) ** (n - 1)


def smallest_spacing_cdf(n: int, x):
    if x < 0:
        return 0 * x
    if x > Fraction(1, n + 1):
        return 0 * x + 1
    return 1 - (1 - (n + 1) * x) ** n


def two_smallest_sum_pdf(n: int, s):
    """Density of ``G_(1) + G_(2)``, by marginalising the joint law of ``(G_(1), s_2)``.

    Two branches, split at ``s = 1/n``; the prefactor is ``n^2 (n+1) / (n-1)``.
    """
    if n < 2:
        raise DomainError("the sum of the two smallest spacings needs n >= 2")
    if s < 0 or s > Fraction(2, n + 1):
        return 0 * s
    c = Fraction(n * n * (n + 1), n - 1)
    upper = (1 - Fraction(n + 1, 2) * s) ** (n - 1)
    if s <= Fraction(1, n):
        return c * (upper - (1 - n * s) ** (n - 1))
    return c * upper


# -- series builders --------------------------------------------------------


@functools.lru_cache(maxsize=512)
def kth_spacing_pdf_series(n: int, k: int) -> PiecewiseSeries:
    """Feller's law of the ``k``-th smallest of ``n + 1`` spacings."""
    if not 1 <= k <= n + 1:
        raise DomainError(f"k-th spacing needs 1 <= k <= n+1, got k={k}, n={n}")
    terms = [
        Term.exact((-1) ** (k - i) * math.comb(k - 1, i - 1), 1, -(n + 2 - i), n - 1,
                   0, Fraction(1, n + 2 - i))
        for i in range(1, k + 1)
    ]
    pre = n * (n + 1) * math.comb(n, k - 1)
    return PiecewiseSeries.build(terms, pre, (0, Fraction(1, n + 2 - k)), n)


@functools.lru_cache(maxsize=512)
def kth_spacing_cdf_series(n: int, k: int) -> PiecewiseSeries:
    if not 1 <= k <= n + 1:
        raise DomainError(f"k-th spacing needs 1 <= k <= n+1, got k={k}, n={n}")
    hi = Fraction(1, n + 2 - k)
    terms = []
    for i in range(1, k + 1):
        c = Fraction((-1) ** (k - i) * math.comb(k - 1, i - 1), n + 2 - i)
        terms.append(Term.exact(c, 1, 0, 0, 0, hi))
        terms.append(Term.exact(-c, 1, -(n + 2 - i), n, 0, Fraction(1, n + 2 - i)))
    pre = (n + 1) * math.comb(n, k - 1)
    return PiecewiseSeries.build(terms, pre, (0, hi), n)


def _check_sum_k(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise DomainError(f"series for a sum of k spacings needs 1 <= k <= n, got k={k}, n={n}")


@functools.lru_cache(maxsize=512)
def sum_smallest_pdf_series(n: int, k: int) -> PiecewiseSeries:
    """``A(k,n) sum_i a(i,k) [1 - (n+2-i)/(k+1-i) s]^(n-1)`` on ``[0, (k+1-i)/(n+2-i)]``."""
    _check_sum_k(n, k)
    tab = coefficient_table(n, k)
    terms = []
    for i in range(1, k + 1):
        a = tab.a[i, k]
        terms.append(Term(a.log, a.exact, Fraction(1), -Fraction(n + 2 - i, k + 1 - i), n - 1,
                          Fraction(0), Fraction(k + 1 - i, n + 2 - i)))
    A = tab.A[k]
    return PiecewiseSeries.build(terms, A.exact, (0, Fraction(k, n + 1)), n, merge=False,
                                 prefactor_log=A.log)


@functools.lru_cache(maxsize=512)
def sum_smallest_cdf_series(n: int, k: int) -> PiecewiseSeries:
    """``A(k,n)/n sum_i a(i,k)(k+1-i)/(n+2-i) (1 - [...]^n H)``."""
    _check_sum_k(n, k)
    tab = coefficient_table(n, k)
    hi = Fraction(k, n + 1)
    terms = []
    for i in range(1, k + 1):
        c = tab.a[i, k].exact * Fraction(k + 1 - i, n + 2 - i)
        terms.append(Term.exact(c, 1, 0, 0, 0, hi))
        terms.append(Term.exact(-c, 1, -Fraction(n + 2 - i, k + 1 - i), n,
                                0, Fraction(k + 1 - i, n + 2 - i)))
    return PiecewiseSeries.build(terms, tab.A[k].exact / n, (0, hi), n)


@functools.lru_cache(maxsize=512)
def sum_largest_pdf_series(n: int, k: int) -> PiecewiseSeries:
    """Direct series for the sum of the ``k`` largest spacings.

    ``A(K,n) sum_i a(i,K) [(s(n+2-i) - k)/(n+2-k-i)]^(n-1)`` on
    ``[k/(n+2-i), 1]`` with ``K = n + 1 - k``.
    """
    _check_sum_k(n, k)
    K = n + 1 - k
    tab = coefficient_table(n, K)
    terms = []
    for i in range(1, K + 1):
        a = tab.a[i, K]
        d = n + 2 - k - i
        terms.append(Term(a.log, a.exact, Fraction(-k, d), Fraction(n + 2 - i, d), n - 1,
                          Fraction(k, n + 2 - i), Fraction(1)))
    A = tab.A[K]
    return PiecewiseSeries.build(terms, A.exact, (Fraction(k, n + 1), 1), n, merge=False,
                                 prefactor_log=A.log)


@functools.lru_cache(maxsize=512)
def sum_largest_cdf_series(n: int, k: int) -> PiecewiseSeries:
    """Direct series for ``P(S_k <= s)``.

    ``A(K,n)/n sum_i a(i,K)(n+2-k-i)/(n+2-i) [(s(n+2-i) - k)/(n+2-k-i)]^n``
    on ``[k/(n+2-i), 1]``.  It equals 1 at ``s = 1``, so it is the lower tail.
    """
    _check_sum_k(n, k)
    K = n + 1 - k
    tab = coefficient_table(n, K)
    terms = []
    for i in range(1, K + 1):
        d = n + 2 - k - i
        c = tab.a[i, K].exact * Fraction(d, n + 2 - i)
        terms.append(Term.exact(c, Fraction(-k, d), Fraction(n + 2 - i, d), n,
                                Fraction(k, n + 2 - i), 1))
    return PiecewiseSeries.build(terms, tab.A[K].exact / n, (Fraction(k, n + 1), 1), n)


@functools.lru_cache(maxsize=512)
def sum_largest_sf_series(n: int, k: int) -> PiecewiseSeries:
    """``P(S_k >= s) = P(s_{n+1-k} <= 1 - s)``, by reflecting the smallest-sum CDF."""
    _check_sum_k(n, k)
    return sum_smallest_cdf_series(n, n + 1 - k).reflected()


# -- distributions ----------------------------------------------------------


@functools.lru_cache(maxsize=512)
def kth_spacing_distribution(n: int, k: int) -> SeriesDistribution:
    return SeriesDistribution(f"G_({k}) | n={n}, with edges",
                              kth_spacing_pdf_series(n, k), kth_spacing_cdf_series(n, k))


@functools.lru_cache(maxsize=512)
def sum_smallest_distribution(n: int, k: int) -> SeriesDistribution | PointMass:
    if k == n + 1:
        return PointMass(1.0, f"s_{k} | n={n}, with edges")
    return SeriesDistribution(f"s_{k} | n={n}, with edges",
                              sum_smallest_pdf_series(n, k), sum_smallest_cdf_series(n, k))


@functools.lru_cache(maxsize=512)
def sum_largest_distribution(n: int, k: int) -> SeriesDistribution | PointMass:
    """Density via the complement ``p(S_k = s) = p(s_{n+1-k} = 1 - s)``."""
    if k == n + 1:
        return PointMass(1.0, f"S_{k} | n={n}, with edges")
    return SeriesDistribution(
        f"S_{k} | n={n}, with edges",
        sum_smallest_pdf_series(n, n + 1 - k).reflected(),
        sum_largest_cdf_series(n, k),
        sum_largest_sf_series(n, k),
    )


def _dist(model: SpacingModel, family: Family, k: int):
    _require_edges(model)
    check_stat(model, StatKind(family, k))
    if family is Family.KTH_SPACING:
        return kth_spacing_distribution(model.n, k)
    if family is Family.SUM_SMALLEST:
        return sum_smallest_distribution(model.n, k)
    return sum_largest_distribution(model.n, k)


def kth_spacing_pdf(model: SpacingModel, k: int, x, policy: EvalPolicy | None = None):
    return _dist(model, Family.KTH_SPACING, k).pdf(x, policy)


def kth_spacing_cdf(model: SpacingModel, k: int, x, policy: EvalPolicy | None = None):
    return _dist(model, Family.KTH_SPACING, k).cdf(x, policy)


def sum_smallest_pdf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    """Density of the sum of the ``k`` smallest spacings.

    For ``k = n + 1`` the statistic is identically 1 and
    :class:`DegenerateDistributionError` is raised carrying the point mass.
    """
    return _dist(model, Family.SUM_SMALLEST, k).pdf(s, policy)


def sum_smallest_cdf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    return _dist(model, Family.SUM_SMALLEST, k).cdf(s, policy)


def sum_largest_pdf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    return _dist(model, Family.SUM_LARGEST, k).pdf(s, policy)


def sum_largest_pdf_direct(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    """Same law as :func:`sum_largest_pdf`, evaluated from the direct series."""
    _require_edges(model)
    check_stat(model, StatKind(Family.SUM_LARGEST, k))
    if k == model.n + 1:
        raise DegenerateDistributionError("S_{n+1} is identically 1", PointMass(1.0))
    series = sum_largest_pdf_series(model.n, k)
    return SeriesDistribution("direct", series, series.antiderivative()).pdf(s, policy)


def sum_largest_cdf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    return _dist(model, Family.SUM_LARGEST, k).cdf(s, policy)


def sum_largest_sf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    return _dist(model, Family.SUM_LARGEST, k).sf(s, policy)
