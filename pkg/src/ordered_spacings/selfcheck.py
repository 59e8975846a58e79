"""Desk-scale invariant suite behind ``ordered-spacings selfcheck``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import betainc

from . import dist_edges
from .coefficients import coeff_A, coeff_a, verify_recursions
from .dist_noedges import marginalize_over_range
from .distribution import get_distribution
from .inference import quantile
from .model import Family, SpacingModel, StatKind
from .montecarlo import draw_statistic, ks_distance
from .quadrature import adaptive_quad
from .series import EvalPolicy, SeriesDistribution

__all__ = ["SelfCheckReport", "run_selfcheck"]

EXACT = EvalPolicy(mode="rational")
KS_POLICY = EvalPolicy(atol=1e-12)


@dataclass
class SelfCheckReport:
    counts: dict[str, list[int]] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def record(self, family: str, ok: bool, where: str = "") -> None:
        c = self.counts.setdefault(family, [0, 0])
        c[1] += 1
        if ok:
            c[0] += 1
        else:
            self.failures.append(f"{family}: FAILED at {where}")

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        out = [f"{name}: {p}/{t} passed" for name, (p, t) in self.counts.items()]
        return out + self.failures


def _laws(ns_with, ns_without):
    for n in ns_with:
        for fam in Family:
            for k in range(1, n + 2):
                yield SpacingModel(n), StatKind(fam, k)
    for n in ns_without:
        for fam in Family:
            for k in range(1, n):
                yield SpacingModel(n, "without"), StatKind(fam, k)


def _tag(model, stat, extra=""):
    return f"n={model.n} edges={model.boundary_mode.value} family={stat.family.value} k={stat.k}{extra}"


def _coefficients(r: SelfCheckReport) -> None:
    rep = verify_recursions(30, 60)
    f = rep.failure
    r.record("coefficient recursions", rep.ok,
             "" if f is None else f"{f.identity} i={f.i} k={f.k} n={f.n}")
    for k in range(1, 31):
        for i in range(1, k + 1):
            lg, ex = coeff_a(i, k), coeff_a(i, k, "rational")
            ok = lg.sign == (-1) ** (i - 1) and math.isclose(float(lg), float(ex), rel_tol=1e-13)
            r.record("coefficient log/rational agreement", ok, f"a({i},{k})")
    for n in range(1, 31):
        for k in range(1, n + 1):
            lg, ex = coeff_A(k, n), coeff_A(k, n, "rational")
            r.record("coefficient log/rational agreement",
                     math.isclose(float(lg), float(ex), rel_tol=1e-13), f"A({k},{n})")


def _reductions(r: SelfCheckReport) -> None:
    for n in range(2, 13):
        m = SpacingModel(n)
        for x in (Fraction(j, 40 * (n + 1)) for j in range(1, 40)):
            ok = dist_edges.sum_smallest_pdf(m, 1, x, EXACT) == dist_edges.smallest_spacing_pdf(n, x)
            r.record("known-law reductions", ok, f"n={n} k=1 x={x}")
        for x in (Fraction(j, 40 * (n + 1)) for j in range(1, 80)):
            ok = dist_edges.sum_smallest_pdf(m, 2, x, EXACT) == dist_edges.two_smallest_sum_pdf(n, x)
            r.record("known-law reductions", ok, f"n={n} k=2 x={x}")


def _normalisation_and_cdf(r: SelfCheckReport) -> None:
    for model, stat in _laws(range(1, 9), range(3, 8)):
        d = get_distribution(model, stat)
        if not isinstance(d, SeriesDistribution):
            continue
        lo, hi = d.support
        bp = d.breakpoints()
        res = adaptive_quad(d.pdf, lo, hi, bp)
        r.record("normalisation", abs(res.value - 1) <= 1e-8, _tag(model, stat, f" integral={res.value!r}"))
        for x in np.linspace(lo, hi, 11)[1:-1]:
            q = adaptive_quad(d.pdf, lo, x, bp).value
            r.record("cdf vs integrated pdf", abs(d.cdf(x) - q) <= 1e-8, _tag(model, stat, f" x={x!r}"))


def _complement(r: SelfCheckReport) -> None:
    for n in range(1, 9):
        m = SpacingModel(n)
        for k in range(1, n + 1):
            for s in (Fraction(j, 23) for j in range(24)):
                lhs = dist_edges.sum_largest_sf(m, k, s, EXACT)
                rhs = dist_edges.sum_smallest_cdf(m, n + 1 - k, 1 - s, EXACT)
                r.record("complement identity", lhs == rhs, f"n={n} k={k} s={s}")


def _noedges(r: SelfCheckReport) -> None:
    for n in (4, 8):
        d = get_distribution(SpacingModel(n, "without"), StatKind(Family.SUM_SMALLEST, n - 1))
        for x in np.linspace(0, 1, 21):
            r.record("no-edges range law", abs(d.cdf(x) - betainc(n - 1, 2, x)) <= 1e-10, f"n={n} x={x!r}")
    for model, stat in _laws((), (4, 6)):
        if stat.family is not Family.KTH_SPACING and stat.k == model.n - 1:
            continue
        d = get_distribution(model, stat)
        lo, hi = d.support
        for x in np.linspace(lo, hi, 7)[1:-1]:
            ref = marginalize_over_range(model, stat, x).value
            r.record("no-edges oracle agreement", abs(d.pdf(x) - ref) <= 1e-8, _tag(model, stat, f" x={x!r}"))


def _quantiles(r: SelfCheckReport) -> None:
    cases = [(SpacingModel(5), StatKind(Family.SUM_SMALLEST, 2)),
             (SpacingModel(10), StatKind(Family.SUM_LARGEST, 2)),
             (SpacingModel(6, "without"), StatKind(Family.KTH_SPACING, 3))]
    for model, stat in cases:
        d = get_distribution(model, stat)
        for p in np.linspace(0.05, 0.95, 19):
            q = quantile(model, stat, p)
            r.record("quantile round trip", abs(d.cdf(q) - p) <= 1e-9, _tag(model, stat, f" p={p!r}"))


def _montecarlo(r: SelfCheckReport) -> None:
    count = 20_000
    crit = 1.628 / math.sqrt(count)
    cases = [(SpacingModel(5), StatKind(Family.SUM_SMALLEST, 2)),
             (SpacingModel(8), StatKind(Family.KTH_SPACING, 3)),
             (SpacingModel(8), StatKind(Family.SUM_LARGEST, 3)),
             (SpacingModel(6, "without"), StatKind(Family.SUM_SMALLEST, 2)),
             (SpacingModel(6, "without"), StatKind(Family.SUM_LARGEST, 2)),
             (SpacingModel(6, "without"), StatKind(Family.KTH_SPACING, 4))]
    for model, stat in cases:
        d = get_distribution(model, stat)
        b = draw_statistic(model, stat, 0, count)
        dist = ks_distance(b, lambda x: d.cdf(x, KS_POLICY))
        r.record("monte carlo agreement", dist <= crit, _tag(model, stat, f" ks={dist:.4g}"))
    for n in (3, 6):
        m = SpacingModel(n)
        for k in range(1, n + 1):
            a = draw_statistic(m, StatKind(Family.SUM_SMALLEST, k), 1, 1000).values
            b = draw_statistic(m, StatKind(Family.SUM_LARGEST, n + 1 - k), 1, 1000).values
            r.record("per-sample exchange identity", bool(np.all(a + b == 1.0)), f"n={n} k={k}")


def run_selfcheck() -> SelfCheckReport:
    report = SelfCheckReport()
    for part in (_coefficients, _reductions, _normalisation_and_cdf, _complement,
                 _noedges, _quantiles, _montecarlo):
        part(report)
    return report
