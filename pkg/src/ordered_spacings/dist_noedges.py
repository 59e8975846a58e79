"""Spacing laws among the ``N`` observed values only (``N - 1`` inner spacings).

Conditionally on the range ``mu = X_(N) - X_(1)``, the ``N - 2`` interior
points are iid uniform on an interval of length ``mu`` whose ends are data,
so the inner spacings are the with-edges spacings of ``N - 2`` samples
scaled by ``mu``.  Marginalising over ``mu ~ Beta(N-1, 2)`` yields closed
forms that are again piecewise power series.  :class:`RangeLaw` owns that
``N -> N - 2`` bookkeeping; :func:`marginalize_over_range` performs the
integral numerically and serves as the reference for the closed forms.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import dist_edges
from .coefficients import coefficient_table
from .errors import DomainError
from .model import BoundaryMode, Family, SpacingModel, StatKind, check_stat
from .quadrature import QuadratureError, QuadResult, adaptive_quad
from .series import EvalPolicy, PiecewiseSeries, SeriesDistribution, Term

__all__ = [
    "RangeLaw",
    "ne_kth_spacing_pdf_series",
    "ne_kth_spacing_cdf_series",
    "ne_sum_smallest_pdf_series",
    "ne_sum_smallest_cdf_series",
    "ne_sum_largest_pdf_series",
    "ne_sum_largest_cdf_series",
    "ne_distribution",
    "ne_breakpoints",
    "ne_kth_spacing_pdf",
    "ne_kth_spacing_cdf",
    "ne_sum_smallest_pdf",
    "ne_sum_smallest_cdf",
    "ne_sum_largest_pdf",
    "ne_sum_largest_cdf",
    "marginalize_over_range",
]


@dataclass(frozen=True)
class RangeLaw:
    """Law of the sample range ``mu``: ``Beta(N-1, 2)``, density ``N(N-1) mu^(N-2) (1-mu)``."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"the no-edges model needs n >= 3, got n={self.n}")

    @property
    def n_eff(self) -> int:
        """Interior points, i.e. the with-edges sample count inside the range."""
        return self.n - 2

    def inner_model(self) -> SpacingModel:
        return SpacingModel(self.n_eff, BoundaryMode.WITH_EDGES)

    def weight(self, mu):
        n = self.n
        return n * (n - 1) * mu ** (n - 2) * (1 - mu)

    def rescaled_density(self, inner_pdf, x: float, mu: np.ndarray) -> np.ndarray:
        """Density at ``x`` of a unit-interval statistic stretched to length ``mu``."""
        return inner_pdf(x / mu) / mu

    @functools.cached_property
    def pdf_series(self) -> PiecewiseSeries:
        n = self.n
        terms = [Term.exact(1, 0, 1, n - 2, 0, 1), Term.exact(-1, 0, 1, n - 1, 0, 1)]
        return PiecewiseSeries.build(terms, n * (n - 1), (0, 1), n)

    def distribution(self) -> SeriesDistribution:
        return SeriesDistribution(f"range | n={self.n}", self.pdf_series,
                                  self.pdf_series.antiderivative())


def _check_k(n: int, k: int, k_max: int, what: str) -> None:
    if not 1 <= k <= k_max:
        raise DomainError(f"{what} needs 1 <= k <= {k_max} for n={n}, got k={k}")


@functools.lru_cache(maxsize=512)
def ne_kth_spacing_pdf_series(n: int, k: int) -> PiecewiseSeries:
    """``(-1)^k N(N-1) C(N-2,k-1) sum_i (-1)^i C(k-1,i-1) [1-(N-i)x]^(N-1) H(x,0,1/(N-i))``."""
    RangeLaw(n)
    _check_k(n, k, n - 1, "k-th inner spacing")
    terms = [
        Term.exact((-1) ** i * math.comb(k - 1, i - 1), 1, -(n - i), n - 1, 0, Fraction(1, n - i))
        for i in range(1, k + 1)
    ]
    pre = (-1) ** k * n * (n - 1) * math.comb(n - 2, k - 1)
    return PiecewiseSeries.build(terms, pre, (0, Fraction(1, n - k)), n)


@functools.lru_cache(maxsize=512)
def ne_kth_spacing_cdf_series(n: int, k: int) -> PiecewiseSeries:
    RangeLaw(n)
    _check_k(n, k, n - 1, "k-th inner spacing")
    hi = Fraction(1, n - k)
    terms = []
    for i in range(1, k + 1):
        c = Fraction((-1) ** i * math.comb(k - 1, i - 1), n - i)
        terms.append(Term.exact(c, 1, 0, 0, 0, hi))
        terms.append(Term.exact(-c, 1, -(n - i), n, 0, Fraction(1, n - i)))
    pre = (-1) ** k * (n - 1) * math.comb(n - 2, k - 1)
    return PiecewiseSeries.build(terms, pre, (0, hi), n)


@functools.lru_cache(maxsize=512)
def ne_sum_smallest_pdf_series(n: int, k: int) -> PiecewiseSeries:
    """``N/(N-2) A(k,N-2) sum_i a(i,k) [1-(N-i)/(k+1-i) s]^(N-1)`` on ``[0,(k+1-i)/(N-i)]``."""
    m = RangeLaw(n).n_eff
    _check_k(n, k, m, "series for the sum of the k smallest inner spacings")
    tab = coefficient_table(m, k)
    terms = []
    for i in range(1, k + 1):
        a = tab.a[i, k]
        terms.append(Term(a.log, a.exact, Fraction(1), -Fraction(n - i, k + 1 - i), n - 1,
                          Fraction(0), Fraction(k + 1 - i, n - i)))
    return PiecewiseSeries.build(terms, Fraction(n, m) * tab.A[k].exact,
                                 (0, Fraction(k, n - 1)), n, merge=False)


@functools.lru_cache(maxsize=512)
def ne_sum_smallest_cdf_series(n: int, k: int) -> PiecewiseSeries:
    m = RangeLaw(n).n_eff
    _check_k(n, k, m, "series for the sum of the k smallest inner spacings")
    tab = coefficient_table(m, k)
    hi = Fraction(k, n - 1)
    terms = []
    for i in range(1, k + 1):
        c = tab.a[i, k].exact * Fraction(k + 1 - i, n - i)
        terms.append(Term.exact(c, 1, 0, 0, 0, hi))
        terms.append(Term.exact(-c, 1, -Fraction(n - i, k + 1 - i), n,
                                0, Fraction(k + 1 - i, n - i)))
    return PiecewiseSeries.build(terms, tab.A[k].exact / m, (0, hi), n)


@functools.lru_cache(maxsize=512)
def ne_sum_largest_pdf_series(n: int, k: int) -> PiecewiseSeries:
    """Density of the sum of the ``k`` largest inner spacings, ``K = N-1-k``.

    N A(K,N-2) / (k^2 (N-2)) * sum_i a(i,K) / (N-k-i)^(N-3) * (
        s^(N-2) [k(N-1) - s(N-i) - k s (N-2)] (N-i-k)^(N-2)
        + [s(N-i) - k]^(N-1) H(s, k/(N-i), 1) )

    The polynomial pieces hold on all of ``[0, 1]`` and are merged exactly.
    """
    m = RangeLaw(n).n_eff
    _check_k(n, k, m, "series for the sum of the k largest inner spacings")
    K = n - 1 - k
    tab = coefficient_table(m, K)
    terms = []
    for i in range(1, K + 1):
        d = n - k - i
        c = tab.a[i, K].exact / Fraction(d) ** (n - 3)
        poly = c * Fraction(d) ** (n - 2)
        terms.append(Term.exact(poly * k * (n - 1), 0, 1, n - 2, 0, 1))
        terms.append(Term.exact(-poly * ((n - i) + k * (n - 2)), 0, 1, n - 1, 0, 1))
        terms.append(Term.exact(c, -k, n - i, n - 1, Fraction(k, n - i), 1))
    pre = n * tab.A[K].exact / (k * k * m)
    return PiecewiseSeries.build(terms, pre, (0, 1), n)


@functools.lru_cache(maxsize=512)
def ne_sum_largest_cdf_series(n: int, k: int) -> PiecewiseSeries:
    """Term-wise antiderivative of :func:`ne_sum_largest_pdf_series`."""
    return ne_sum_largest_pdf_series(n, k).antiderivative()


@functools.lru_cache(maxsize=512)
def ne_distribution(n: int, family: Family, k: int) -> SeriesDistribution:
    model = SpacingModel(n, BoundaryMode.NO_EDGES)
    family = Family(family)
    check_stat(model, StatKind(family, k))
    label = f"{family.value} k={k} | n={n}, no edges"
    if family is Family.KTH_SPACING:
        return SeriesDistribution(label, ne_kth_spacing_pdf_series(n, k),
                                  ne_kth_spacing_cdf_series(n, k))
    if k == n - 1:
        # every inner spacing: the statistic is the range itself
        d = RangeLaw(n).distribution()
        return SeriesDistribution(label, d.pdf_series, d.cdf_series)
    if family is Family.SUM_SMALLEST:
        return SeriesDistribution(label, ne_sum_smallest_pdf_series(n, k),
                                  ne_sum_smallest_cdf_series(n, k))
    return SeriesDistribution(label, ne_sum_largest_pdf_series(n, k),
                              ne_sum_largest_cdf_series(n, k))


def ne_breakpoints(n: int, family: Family, k: int) -> list[Fraction]:
    """Exact kinks of the density (window ends) together with the support ends."""
    return ne_distribution(n, family, k).pdf_series.breakpoints_exact()


def _dist(model: SpacingModel, family: Family, k: int) -> SeriesDistribution:
    if model.with_edges:
        raise DomainError("this law is for the no-edges model; see dist_edges")
    return ne_distribution(model.n, family, k)


def ne_kth_spacing_pdf(model: SpacingModel, k: int, x, policy: EvalPolicy | None = None):
    return _dist(model, Family.KTH_SPACING, k).pdf(x, policy)


def ne_kth_spacing_cdf(model: SpacingModel, k: int, x, policy: EvalPolicy | None = None):
    return _dist(model, Family.KTH_SPACING, k).cdf(x, policy)


def ne_sum_smallest_pdf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    return _dist(model, Family.SUM_SMALLEST, k).pdf(s, policy)


def ne_sum_smallest_cdf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    return _dist(model, Family.SUM_SMALLEST, k).cdf(s, policy)


def ne_sum_largest_pdf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    return _dist(model, Family.SUM_LARGEST, k).pdf(s, policy)


def ne_sum_largest_cdf(model: SpacingModel, k: int, s, policy: EvalPolicy | None = None):
    return _dist(model, Family.SUM_LARGEST, k).cdf(s, policy)


def marginalize_over_range(model: SpacingModel, stat: StatKind, x: float, *,
                           abs_tol: float = 1e-11, max_intervals: int = 4000) -> QuadResult:
    """Numerically integrate the with-edges law over the range, from first principles.

    Evaluates ``int_x^1 Beta(N-1,2)(mu) * (1/mu) p_inner(x/mu) dmu`` where
    ``p_inner`` is the with-edges density for ``N - 2`` samples.  This is a
    reference for the closed forms, not the production path.

    Raises :class:`QuadratureError` (carrying the achieved error estimate)
    if the interval budget is exhausted.
    """
    if model.with_edges:
        raise DomainError("marginalisation applies to the no-edges model")
    check_stat(model, stat)
    if x < 0:
        return QuadResult(0.0, 0.0, 0, True)
    law = RangeLaw(model.n)
    inner = law.inner_model()
    if stat.family is not Family.KTH_SPACING and stat.k == inner.n + 1:
        raise DomainError("the sum of every inner spacing is the range itself; no integral needed")
    if stat.family is Family.KTH_SPACING:
        inner_dist = dist_edges.kth_spacing_distribution(inner.n, stat.k)
    elif stat.family is Family.SUM_SMALLEST:
        inner_dist = dist_edges.sum_smallest_distribution(inner.n, stat.k)
    else:
        inner_dist = dist_edges.sum_largest_distribution(inner.n, stat.k)

    def integrand(mu):
        return law.weight(mu) * law.rescaled_density(inner_dist.pdf, x, mu)

    lo = max(x, 0.0)
    if lo >= 1:
        return QuadResult(0.0, 0.0, 0, True)
    kinks = [x / float(b) for b in inner_dist.pdf_series.breakpoints_exact() if b > 0]
    res = adaptive_quad(integrand, lo, 1.0, kinks, abs_tol=abs_tol, max_intervals=max_intervals)
    if not res.converged:
        raise QuadratureError(
            f"range marginalisation did not converge at x={x!r}: error estimate {res.error:.3g}", res
        )
    return res
