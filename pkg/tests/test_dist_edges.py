from fractions import Fraction

import numpy as np
import pytest

from ordered_spacings import dist_edges
from ordered_spacings.distribution import get_distribution
from ordered_spacings.errors import DegenerateDistributionError, DomainError
from ordered_spacings.model import Family, SpacingModel, StatKind
from ordered_spacings.series import EvalPolicy, PointMass
import oracles

EXACT = EvalPolicy(mode="rational")


def test_documented_examples():
    m5 = SpacingModel(5)
    assert dist_edges.sum_smallest_pdf(m5, 2, Fraction(3, 20), EXACT) == Fraction(657, 200)
    assert dist_edges.two_smallest_sum_pdf(5, Fraction(3, 20)) == Fraction(657, 200)
    assert dist_edges.kth_spacing_pdf(m5, 1, 0.05) == pytest.approx(5 * 6 * 0.7 ** 4, rel=1e-14)
    m1 = SpacingModel(1)
    assert dist_edges.sum_smallest_pdf(m1, 1, [0.0, 0.25, 0.5]).tolist() == [2.0, 2.0, 2.0]
    assert dist_edges.sum_smallest_cdf(m1, 1, 0.25) == pytest.approx(0.5)


def test_single_spacing_is_beta_1_n():
    m = SpacingModel(7)
    for x in (Fraction(0), Fraction(1, 5), Fraction(9, 10)):
        assert dist_edges.single_spacing_pdf(m, x) == 7 * (1 - x) ** 6
        assert dist_edges.single_spacing_cdf(m, x) == 1 - (1 - x) ** 7
    with pytest.raises(DomainError):
        dist_edges.single_spacing_pdf(m, 1.5)


@pytest.mark.parametrize("n", range(1, 9))
def test_against_dirichlet_oracle(n):
    grid = [Fraction(j, 29) for j in range(30)]
    for fam in Family:
        k_top = n + 1 if fam is Family.KTH_SPACING else n
        for k in range(1, k_top + 1):
            d = get_distribution(SpacingModel(n), StatKind(fam, k))
            bps = set(d.pdf_series.breakpoints_exact())
            for t in grid:
                assert d.cdf(t, EXACT) == oracles.edges_cdf(n, fam.value, k, t)
                assert d.sf(t, EXACT) == oracles.edges_sf(n, fam.value, k, t)
                if t not in bps or n > 1:  # n = 1 densities jump at breakpoints
                    assert d.pdf(t, EXACT) == oracles.edges_pdf(n, fam.value, k, t)


@pytest.mark.parametrize("n", [3, 10, 25])
def test_largest_spacing_whitworth(n):
    d = get_distribution(SpacingModel(n), StatKind(Family.KTH_SPACING, n + 1))
    for j in range(0, 41):
        x = Fraction(j, 40)
        assert d.cdf(x, EXACT) == oracles.whitworth_max_cdf(n, x)
    # the largest spacing is also S_1
    s1 = get_distribution(SpacingModel(n), StatKind(Family.SUM_LARGEST, 1))
    xs = np.linspace(0, 1, 201)
    assert np.allclose(s1.cdf(xs), d.cdf(xs), rtol=0, atol=1e-14)


def test_direct_sum_largest_pdf_equals_reflection():
    for n in (2, 5, 12):
        m = SpacingModel(n)
        for k in range(1, n + 1):
            for s in (Fraction(j, 17) for j in range(18)):
                assert (dist_edges.sum_largest_pdf(m, k, s, EXACT)
                        == dist_edges.sum_largest_pdf_direct(m, k, s, EXACT))


def test_supports():
    n = 9
    for k in range(1, n + 1):
        assert get_distribution(SpacingModel(n), StatKind(Family.SUM_SMALLEST, k)).support == (0.0, k / (n + 1))
        assert get_distribution(SpacingModel(n), StatKind(Family.SUM_LARGEST, k)).support == (k / (n + 1), 1.0)


def test_degenerate_all_spacings():
    m = SpacingModel(4)
    for fam in (Family.SUM_SMALLEST, Family.SUM_LARGEST):
        d = get_distribution(m, StatKind(fam, 5))
        assert isinstance(d, PointMass)
        with pytest.raises(DegenerateDistributionError) as info:
            d.pdf(0.5)
        assert isinstance(info.value.point_mass, PointMass)
        assert d.cdf(1.0) == 1.0 and d.cdf(0.99) == 0.0


def test_model_mismatch_and_range():
    with pytest.raises(DomainError):
        dist_edges.sum_smallest_pdf(SpacingModel(5, "without"), 1, 0.1)
    with pytest.raises(DomainError):
        dist_edges.sum_smallest_pdf(SpacingModel(5), 7, 0.1)
    with pytest.raises(DomainError):
        dist_edges.two_smallest_sum_pdf(1, Fraction(1, 4))


def test_float_and_rational_agree_at_moderate_n():
    d = get_distribution(SpacingModel(40), StatKind(Family.SUM_SMALLEST, 20))
    lo, hi = d.support
    xs = np.linspace(lo, hi, 301)
    fl = d.pdf(xs)
    ex = np.array([float(v) for v in d.pdf(list(xs), EXACT)])
    nz = ex != 0
    assert np.max(np.abs(fl[nz] - ex[nz]) / np.abs(ex[nz])) < 1e-12
