import json

import numpy as np
import pytest

from ordered_spacings.distribution import get_distribution
from ordered_spacings.errors import DomainError
from ordered_spacings.inference import TestResult, evaluate_data, quantile, quantiles
from ordered_spacings.model import BoundaryMode, Family, SpacingModel, StatKind
from ordered_spacings.montecarlo import draw_statistic

SMIN, SMAX, KTH = Family.SUM_SMALLEST, Family.SUM_LARGEST, Family.KTH_SPACING


def test_quantile_endpoints_and_median():
    m, s = SpacingModel(1), StatKind(SMIN, 1)
    assert quantile(m, s, 0) == 0.0
    assert quantile(m, s, 1) == 0.5
    assert quantile(m, s, 0.5) == pytest.approx(0.25, abs=1e-15)
    m10 = SpacingModel(10)
    assert quantile(m10, StatKind(SMAX, 2), 0) == pytest.approx(2 / 11)
    with pytest.raises(DomainError):
        quantile(m, s, 1.5)


def test_quantile_roundtrip_sum_largest():
    m, s = SpacingModel(10), StatKind(SMAX, 2)
    q = quantile(m, s, 0.99)
    assert abs(get_distribution(m, s).cdf(q) - 0.99) <= 1e-9


@pytest.mark.parametrize("model,stat", [
    (SpacingModel(7), StatKind(KTH, 3)),
    (SpacingModel(7), StatKind(KTH, 8)),
    (SpacingModel(9, "without"), StatKind(SMAX, 2)),
])
def test_cdf_of_quantile_and_back(model, stat):
    d = get_distribution(model, stat)
    ps = np.linspace(0.01, 0.99, 99)
    qs = quantiles(model, stat, ps)
    assert np.all(np.diff(qs) > 0)
    assert np.max(np.abs(d.cdf(qs) - ps)) <= 1e-9
    # quantile(CDF(s)) recovers s where the density is not tiny
    lo, hi = d.support
    for s_ in np.linspace(lo, hi, 23)[1:-1]:
        if d.pdf(s_) > 1e-3:
            assert quantile(model, stat, d.cdf(s_)) == pytest.approx(s_, abs=1e-9 / d.pdf(s_))


def test_quantile_of_point_mass():
    assert quantile(SpacingModel(3), StatKind(SMIN, 4), 0.3) == 1.0


def test_evaluate_data_examples():
    r = evaluate_data([0.5], StatKind(SMIN, 1), "with")
    assert r.observed == 0.5 and r.p_small == 1.0 and r.p_large == 0.0
    r = evaluate_data([0.2, 0.4, 0.6, 0.8], StatKind(SMIN, 5))
    assert r.observed == 1.0 and r.p_small == 1.0 and r.p_large == 1.0


def test_evaluate_data_matches_simulation():
    values = np.random.default_rng(7).random(20)
    stat = StatKind(SMAX, 3)
    r = evaluate_data(values, stat)
    sims = draw_statistic(SpacingModel(20), stat, 7, 10**6).values
    frac = (sims >= r.observed).mean()
    se = np.sqrt(frac * (1 - frac) / sims.size)
    assert abs(r.p_large - frac) < 4 * se
    assert r.p_small + r.p_large == pytest.approx(1, abs=1e-12)


def test_permutation_invariance_and_ties():
    rng = np.random.default_rng(3)
    x = rng.random(12)
    x[3] = x[5]
    for stat in (StatKind(SMIN, 2), StatKind(KTH, 1), StatKind(SMAX, 4)):
        for mode in ("with", "without"):
            base = evaluate_data(x, stat, mode)
            for _ in range(5):
                assert evaluate_data(rng.permutation(x), stat, mode) == base
    assert evaluate_data(x, StatKind(KTH, 1)).observed == 0.0


def test_rejections():
    with pytest.raises(DomainError, match="index 2"):
        evaluate_data([0.1, 0.2, 1.5], StatKind(SMIN, 1))
    with pytest.raises(DomainError, match="index 0"):
        evaluate_data([float("nan")], StatKind(SMIN, 1))
    with pytest.raises(DomainError):
        evaluate_data([0.1, 0.2], StatKind(SMIN, 1), "without")
    with pytest.raises(DomainError):
        evaluate_data([0.1, 0.2], StatKind(SMIN, 4))


def test_result_fields():
    r = evaluate_data([0.1, 0.5, 0.9], StatKind(KTH, 2), BoundaryMode.NO_EDGES)
    d = r.to_dict()
    assert list(d) == ["stat", "observed", "p_small", "p_large", "n", "boundary_mode"]
    assert d["boundary_mode"] == "without" and d["n"] == 3
    json.dumps(d)
    assert isinstance(r, TestResult)
