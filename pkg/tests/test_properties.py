import numpy as np
from hypothesis import assume, given, settings, strategies as st

from ordered_spacings.coefficients import SignedLog
from ordered_spacings.distribution import get_distribution
from ordered_spacings.inference import evaluate_data
from ordered_spacings.model import Family, SpacingModel, StatKind
from ordered_spacings.montecarlo import statistic_from_values
from ordered_spacings.series import EvalPolicy
import oracles

EXACT = EvalPolicy(mode="rational")
SMIN, SMAX, KTH = Family.SUM_SMALLEST, Family.SUM_LARGEST, Family.KTH_SPACING

fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4)
unit = st.fractions(min_value=0, max_value=1, max_denominator=10**5)


@st.composite
def laws(draw, n_max=12, edges=True):
    n = draw(st.integers(1 if edges else 3, n_max))
    fam = draw(st.sampled_from(list(Family)))
    if edges:
        k_top = n + 1 if fam is KTH else n
    else:
        k_top = n - 1 if fam is KTH else n - 2
        assume(k_top >= 1)
    k = draw(st.integers(1, k_top))
    return SpacingModel(n, "with" if edges else "without"), StatKind(fam, k)


@given(fractions, fractions)
def test_signedlog_mul_matches_fraction(a, b):
    got = float(SignedLog.from_fraction(a) * SignedLog.from_fraction(b))
    want = float(a * b)
    assert abs(got - want) <= 1e-13 * abs(want)


@given(fractions, fractions)
def test_signedlog_add_matches_fraction_without_cancellation(a, b):
    assume(a * b >= 0)
    got = float(SignedLog.from_fraction(a) + SignedLog.from_fraction(b))
    want = float(a + b)
    assert abs(got - want) <= 1e-13 * abs(want)


@given(fractions)
def test_signedlog_self_cancellation_is_exact_zero(a):
    x = SignedLog.from_fraction(a)
    assert (x - x).sign == 0


@settings(max_examples=60, deadline=None)
@given(laws(), st.lists(unit, min_size=1, max_size=5))
def test_exact_laws_match_dirichlet_oracle(law, ts):
    model, stat = law
    d = get_distribution(model, stat)
    for t in ts:
        assert d.cdf(t, EXACT) == oracles.edges_cdf(model.n, stat.family.value, stat.k, t)


@settings(max_examples=60, deadline=None)
@given(st.one_of(laws(), laws(edges=False)), st.lists(unit, min_size=1, max_size=5))
def test_cdf_and_sf_are_exact_complements(law, ts):
    model, stat = law
    d = get_distribution(model, stat)
    for t in ts:
        assert d.cdf(t, EXACT) + d.sf(t, EXACT) == 1


@settings(max_examples=40, deadline=None)
@given(laws(), unit)
def test_smallest_and_largest_sums_reflect(law, t):
    model, stat = law
    assume(stat.family is SMIN and stat.k < model.n + 1)
    n = model.n
    lo = get_distribution(model, StatKind(SMIN, stat.k))
    hi = get_distribution(model, StatKind(SMAX, n + 1 - stat.k))
    # s_k = 1 - S_{N+1-k}, so P(s_k <= t) = P(S_{N+1-k} >= 1 - t)
    assert lo.cdf(t, EXACT) == hi.sf(1 - t, EXACT)


@settings(max_examples=40, deadline=None)
@given(st.one_of(laws(n_max=30), laws(n_max=30, edges=False)),
       st.lists(st.floats(0, 1), min_size=2, max_size=40))
def test_float_cdf_monotone_and_bounded(law, xs):
    model, stat = law
    d = get_distribution(model, stat)
    x = np.sort(np.asarray(xs))
    c = np.asarray(d.cdf(x))
    assert np.all((c >= 0) & (c <= 1))
    assert np.all(np.diff(c) >= -1e-13)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=3, max_size=25), st.randoms(use_true_random=False),
       st.sampled_from(["with", "without"]))
def test_evaluate_data_ignores_order(values, rnd, mode):
    n = len(values)
    stat = StatKind(KTH, 1 + rnd.randrange(n - 1))
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert evaluate_data(shuffled, stat, mode) == evaluate_data(values, stat, mode)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.data())
def test_statistics_split_the_total(values, data):
    x = np.asarray(values)
    n = x.size
    m = SpacingModel(n)
    k = data.draw(st.integers(1, n))
    lo = statistic_from_values(x, m, StatKind(SMIN, k))[0]
    hi = statistic_from_values(x, m, StatKind(SMAX, n + 1 - k))[0]
    assert abs(lo + hi - 1) <= 1e-15 * (n + 1)
    # m largest spacings sum to at most m times the largest one
    gmax = statistic_from_values(x, m, StatKind(KTH, n + 1))[0]
    assert hi <= (n + 1 - k) * gmax + 1e-15
