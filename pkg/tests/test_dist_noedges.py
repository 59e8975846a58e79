import numpy as np
import pytest
from scipy import stats

from ordered_spacings import dist_noedges
from ordered_spacings.dist_noedges import RangeLaw, marginalize_over_range, ne_distribution
from ordered_spacings.errors import DomainError
from ordered_spacings.model import Family, SpacingModel, StatKind
from ordered_spacings.quadrature import adaptive_quad
from ordered_spacings.series import EvalPolicy

EXACT = EvalPolicy(mode="rational")


def _laws(n):
    for fam in Family:
        for k in range(1, n):
            yield fam, k


@pytest.mark.parametrize("n", [3, 5, 8])
def test_closed_forms_match_marginalisation(n):
    m = SpacingModel(n, "without")
    for fam, k in _laws(n):
        if fam is not Family.KTH_SPACING and k == n - 1:
            continue
        d = ne_distribution(n, fam, k)
        lo, hi = d.support
        for x in np.linspace(lo, hi, 13):
            ref = marginalize_over_range(m, StatKind(fam, k), float(x))
            assert ref.converged
            assert d.pdf(x) == pytest.approx(ref.value, abs=1e-10)


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_range_law_is_beta(n):
    law = RangeLaw(n)
    x = np.linspace(0, 1, 101)
    d = law.distribution()
    assert np.allclose(d.pdf(x), stats.beta(n - 1, 2).pdf(x), atol=1e-12)
    assert np.allclose(d.cdf(x), stats.beta(n - 1, 2).cdf(x), atol=1e-13)
    assert law.n_eff == n - 2
    assert law.weight(0.5) == pytest.approx(stats.beta(n - 1, 2).pdf(0.5))


def test_all_inner_spacings_use_range():
    for fam in (Family.SUM_SMALLEST, Family.SUM_LARGEST):
        d = ne_distribution(6, fam, 5)
        assert d.cdf(0.5) == pytest.approx(stats.beta(5, 2).cdf(0.5), abs=1e-14)
    with pytest.raises(DomainError):
        marginalize_over_range(SpacingModel(6, "without"), StatKind(Family.SUM_SMALLEST, 5), 0.3)


@pytest.mark.parametrize("n", [3, 6, 11])
def test_normalised_and_cdf_consistent(n):
    for fam, k in _laws(n):
        d = ne_distribution(n, fam, k)
        lo, hi = d.support
        bp = d.breakpoints()
        assert adaptive_quad(d.pdf, lo, hi, bp).value == pytest.approx(1, abs=1e-10)
        for x in np.linspace(lo, hi, 9):
            assert d.cdf(x) == pytest.approx(adaptive_quad(d.pdf, lo, x, bp).value, abs=1e-10)


def test_sum_largest_support_starts_at_zero():
    # the polynomial piece alone carries the law below k/(N-1)
    d = ne_distribution(8, Family.SUM_LARGEST, 3)
    assert d.support == (0.0, 1.0)
    assert d.pdf(0.2) > 0 and 0.2 < 3 / 7


def test_wrappers_and_mismatch():
    m = SpacingModel(5, "without")
    assert dist_noedges.ne_sum_smallest_cdf(m, 2, 1.0) == 1.0
    assert dist_noedges.ne_kth_spacing_cdf(m, 1, 0.0) == 0.0
    assert dist_noedges.ne_sum_largest_pdf(m, 1, 0.3) == pytest.approx(
        ne_distribution(5, Family.SUM_LARGEST, 1).pdf(0.3))
    with pytest.raises(DomainError):
        dist_noedges.ne_kth_spacing_pdf(SpacingModel(5), 1, 0.1)
    with pytest.raises(DomainError):
        SpacingModel(2, "without")
    with pytest.raises(DomainError):
        dist_noedges.ne_sum_smallest_pdf(m, 5, 0.1)


def test_exact_and_float_agree():
    d = ne_distribution(14, Family.SUM_LARGEST, 4)
    xs = np.linspace(0.01, 0.99, 50)
    ex = np.array([float(v) for v in d.cdf(list(xs), EXACT)])
    assert np.allclose(d.cdf(xs), ex, rtol=1e-12, atol=0)


def test_marginalisation_outside():
    m = SpacingModel(5, "without")
    assert marginalize_over_range(m, StatKind(Family.KTH_SPACING, 1), -0.1).value == 0.0
    with pytest.raises(DomainError):
        marginalize_over_range(SpacingModel(5), StatKind(Family.KTH_SPACING, 1), 0.1)
