import json
from fractions import Fraction

import numpy as np
import pytest

from ordered_spacings.errors import DegenerateDistributionError, PrecisionError
from ordered_spacings.series import EvalPolicy, PiecewiseSeries, PointMass, SeriesDistribution, Term

EXACT = EvalPolicy(mode="rational")


def _series(terms, support=(0, 1), prefactor=1, n=3, merge=True):
    return PiecewiseSeries.build([Term.exact(*t) for t in terms], Fraction(prefactor), support, n,
                                 merge=merge)


def test_merge_combines_like_terms_exactly():
    s = _series([(2, 1, -1, 3, 0, 1), (-2, 1, -1, 3, 0, 1), (5, 1, 0, 0, 0, 1), (1, 7, 0, 0, 0, 1)])
    # the cubic cancels; the two constants on the same window merge to 5 + 1
    assert len(s.terms) == 1
    assert s.evaluate_exact(Fraction(1, 3)) == 6


def test_windows_are_closed():
    s = _series([(1, 1, 0, 0, 0, Fraction(1, 2)), (1, 1, 0, 0, Fraction(1, 2), 1)])
    assert s.evaluate_exact(Fraction(1, 2)) == 2
    assert s.evaluate_exact(Fraction(1, 4)) == 1
    assert s.evaluate(0.5) == 2.0
    assert s.evaluate(0.25) == 1.0


def test_antiderivative_matches_exact_integral():
    # 3(1 - 2x)^2 on [0, 1/2]
    s = _series([(3, 1, -2, 2, 0, Fraction(1, 2))], support=(0, Fraction(1, 2)))
    F = s.antiderivative()
    for x in (Fraction(0), Fraction(1, 7), Fraction(1, 3), Fraction(1, 2)):
        assert F.evaluate_exact(x) == Fraction(1, 2) * (1 - (1 - 2 * x) ** 3)


def test_antiderivative_rejects_interior_jump():
    s = _series([(1, 1, 0, 0, 0, Fraction(1, 2))], support=(0, 1))
    with pytest.raises(ValueError):
        s.antiderivative()


def test_reflected_and_complement():
    s = _series([(1, 0, 1, 3, 0, 1)])  # x^3
    r = s.reflected()
    c = s.complement()
    for x in (Fraction(0), Fraction(2, 9), Fraction(1)):
        assert r.evaluate_exact(x) == (1 - x) ** 3
        assert c.evaluate_exact(x) == 1 - x ** 3


def test_float_matches_exact_and_error_bound_holds():
    # an alternating sum with strong cancellation: sum_j (-1)^j C(20,j) (1 - j x/20)^19
    from math import comb
    terms = [((-1) ** j * comb(20, j), 1, Fraction(-j, 20), 19, 0, Fraction(20, max(j, 1)) if j else 1)
             for j in range(0, 21)]
    terms = [(c, a, b, p, lo, min(hi, 1)) for c, a, b, p, lo, hi in terms]
    s = _series(terms, merge=False, n=20)
    xs = np.linspace(0, 1, 997)
    for terms_path in (False, True):
        v, e = s.evaluate_float(xs, terms=terms_path)
        exact = np.array([float(s.evaluate_exact(x)) for x in xs])
        assert np.all(np.abs(v - exact) <= e + 1e-300)


def test_guard_falls_back_or_raises():
    # (x - 1/3)^3 next to its root: every float expansion cancels
    s = _series([(1, Fraction(-1, 3), 1, 3, 0, 1)], n=5)
    x = float(Fraction(1, 3))
    exact = float(s.evaluate_exact(x))
    assert exact != 0
    with pytest.raises(PrecisionError) as info:
        s.evaluate(x, EvalPolicy(fallback=False))
    assert info.value.x == x
    assert s.evaluate(x) == exact
    with pytest.raises(PrecisionError):
        s.evaluate(x, EvalPolicy(rational_n_max=4))


def test_guard_respects_atol():
    s = _series([(1, Fraction(-1, 3), 1, 3, 0, 1)], n=5)
    x = float(Fraction(1, 3))
    assert abs(s.evaluate(x, EvalPolicy(fallback=False, atol=1e-12))) < 1e-12


def test_rational_mode_returns_fractions():
    s = _series([(1, 0, 1, 2, 0, 1)])
    assert s.evaluate(Fraction(1, 3), EXACT) == Fraction(1, 9)
    assert s.evaluate([0.5, 0.25], EXACT) == [Fraction(1, 4), Fraction(1, 16)]


def test_json_roundtrip_fields():
    s = _series([(2, 1, -1, 3, 0, 1)])
    d = json.loads(s.to_json())
    assert set(d) == {"terms", "prefactor", "support_lo", "support_hi"}
    assert set(d["terms"][0]) == {"coeff", "shift", "slope", "power", "window_lo", "window_hi"}
    assert d["terms"][0]["coeff"]["sign"] == 1


def test_distribution_edges_and_outside():
    pdf = _series([(2, 1, 0, 0, 0, Fraction(1, 2))], support=(0, Fraction(1, 2)))
    d = SeriesDistribution("u", pdf, pdf.antiderivative())
    assert d.cdf(-1.0) == 0.0 and d.cdf(0.0) == 0.0 and d.cdf(0.5) == 1.0 and d.cdf(3.0) == 1.0
    assert d.sf(0.0) == 1.0 and d.sf(0.5) == 0.0
    assert d.pdf(0.7) == 0.0
    assert d.cdf(Fraction(1, 8), EXACT) == Fraction(1, 4)
    assert np.allclose(d.cdf([0.1, 0.2]), [0.2, 0.4])


def test_support_ends_compared_exactly():
    # support end 1/3 is not a float; float(1/3) lies just inside it
    pdf = _series([(3, 1, 0, 0, 0, Fraction(1, 3))], support=(0, Fraction(1, 3)))
    d = SeriesDistribution("u", pdf, pdf.antiderivative())
    x = float(Fraction(1, 3))
    assert d.sf(x) == float(1 - 3 * Fraction(x))
    assert d.sf(x) > 0


def test_point_mass():
    pm = PointMass(1.0)
    with pytest.raises(DegenerateDistributionError):
        pm.pdf(0.5)
    assert pm.cdf(0.999) == 0.0 and pm.cdf(1.0) == 1.0
    assert pm.sf(1.0) == 1.0 and pm.sf(1.5) == 0.0
    assert pm.cdf(1, EXACT) == Fraction(1)


def test_policy_validation():
    with pytest.raises(ValueError):
        EvalPolicy(mode="fast")


def test_rational_cap_from_environment(monkeypatch):
    monkeypatch.setenv("ORDERED_SPACINGS_RATIONAL_NMAX", "7")
    assert EvalPolicy().rational_n_max == 7
