"""Piecewise power series, the common shape of every spacing law here.

A :class:`PiecewiseSeries` is

    prefactor * sum_t coeff_t * (shift_t + slope_t * x)^power_t * H(x, lo_t, hi_t)

with ``H`` the indicator of the *closed* window ``[lo_t, hi_t]``.  All
parameters are held exactly (``Fraction``); coefficients additionally carry
a :class:`SignedLog` used by the float path.

Float evaluation has two stages, each with a rounding-error bound:

1. On every piece between consecutive breakpoints the series is a single
   polynomial.  Its Taylor coefficients about a few centres in the piece
   are computed exactly once and evaluated by Horner's rule.  This basis is
   far better conditioned than the alternating terms themselves.
2. Points still short of the requested accuracy are re-evaluated term by
   term in signed log space, summed in increasing magnitude with Neumaier
   compensation, and the better of the two estimates is kept.

Points whose estimated accuracy is still insufficient are re-evaluated
exactly (rational arithmetic) or rejected with :class:`PrecisionError`,
depending on :class:`EvalPolicy`.
"""

from __future__ import annotations

import functools
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np
from gmpy2 import mpq

from .coefficients import SignedLog
from .errors import DegenerateDistributionError, PrecisionError

__all__ = [
    "EvalPolicy",
    "Term",
    "PiecewiseSeries",
    "SeriesDistribution",
    "PointMass",
    "RATIONAL_NMAX_ENV",
    "to_fraction",
]

RATIONAL_NMAX_ENV = "ORDERED_SPACINGS_RATIONAL_NMAX"
_EPS = np.finfo(float).eps


def _rational_n_max_default() -> int:
    raw = os.environ.get(RATIONAL_NMAX_ENV)
    return 60 if raw is None else int(raw)


@dataclass(frozen=True)
class EvalPolicy:
    """How to evaluate a series.

    mode
        ``"float"`` (signed-log fast path with precision guard) or
        ``"rational"`` (exact; returns ``Fraction``).
    fallback
        In float mode, re-evaluate guard-flagged points exactly when the
        sample count is at most ``rational_n_max``; otherwise raise.
    min_digits
        Required estimated number of correct significant digits.
    atol
        Estimated absolute error that is always acceptable, whatever the
        relative accuracy.  Zero means the guard is purely relative.
    """

    mode: Literal["float", "rational"] = "float"
    fallback: bool = True
    clamp_negative_pdf: bool = True
    negative_tolerance: float = 1e-10
    min_digits: float = 12.0
    atol: float = 0.0
    rational_n_max: int = field(default_factory=_rational_n_max_default)

    def __post_init__(self):
        if self.mode not in ("float", "rational"):
            raise ValueError(f"unknown evaluation mode {self.mode!r}")
        if not self.negative_tolerance > 0:
            raise ValueError("negative_tolerance must be > 0")


def _q(v: Fraction):
    return mpq(v.numerator, v.denominator)


def to_fraction(x) -> Fraction:
    """Exact conversion; floats map to their binary value."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


@dataclass(frozen=True)
class Term:
    coeff: SignedLog
    coeff_exact: Fraction
    shift: Fraction
    slope: Fraction
    power: int
    window_lo: Fraction
    window_hi: Fraction

    @classmethod
    def exact(cls, coeff: Fraction, shift, slope, power: int, lo, hi) -> Term:
        coeff = Fraction(coeff)
        return cls(SignedLog.from_fraction(coeff), coeff, Fraction(shift), Fraction(slope),
                   int(power), Fraction(lo), Fraction(hi))

    def base_exact(self, x: Fraction) -> Fraction:
        return self.shift + self.slope * x

    def shape(self) -> tuple:
        return (self.shift, self.slope, self.power, self.window_lo, self.window_hi)


@dataclass(frozen=True)
class PiecewiseSeries:
    terms: tuple[Term, ...]
    prefactor: SignedLog
    prefactor_exact: Fraction
    support_lo: Fraction
    support_hi: Fraction
    n: int  # sample count, used for the rational fallback cap

    def __post_init__(self):
        for t in self.terms:
            if t.window_lo < self.support_lo or t.window_hi > self.support_hi:
                raise ValueError(f"term window [{t.window_lo}, {t.window_hi}] outside support")
        # float copies for the vectorised path, gmpy2 rationals for the exact one
        object.__setattr__(self, "_f", _FloatTerms(self))
        object.__setattr__(self, "_q", tuple(
            (_q(t.coeff_exact), _q(t.shift), _q(t.slope), t.power, _q(t.window_lo), _q(t.window_hi))
            for t in self.terms
        ))

    @classmethod
    def build(cls, terms, prefactor: Fraction, support, n: int, *, merge: bool = True,
              prefactor_log: SignedLog | None = None) -> PiecewiseSeries:
        terms = tuple(terms)
        if merge:
            terms = _merge(terms)
        prefactor = Fraction(prefactor)
        plog = SignedLog.from_fraction(prefactor) if prefactor_log is None else prefactor_log
        lo, hi = support
        return cls(terms, plog, prefactor, Fraction(lo), Fraction(hi), n)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.support_lo), float(self.support_hi)

    def breakpoints_exact(self) -> list[Fraction]:
        pts = {self.support_lo, self.support_hi}
        for t in self.terms:
            pts.update((t.window_lo, t.window_hi))
        return sorted(pts)

    def breakpoints(self) -> np.ndarray:
        return np.array([float(b) for b in self.breakpoints_exact()])

    # -- evaluation ------------------------------------------------------

    def evaluate_exact(self, x) -> Fraction:
        x = to_fraction(x)
        xq = mpq(x.numerator, x.denominator)
        total = mpq(0)
        for c, a, b, p, lo, hi in self._q:
            if lo <= xq <= hi:
                total += c if p == 0 else c * (a + b * xq) ** p
        return self.prefactor_exact * Fraction(int(total.numerator), int(total.denominator))

    @functools.cached_property
    def _local(self) -> _LocalPolys:
        return _LocalPolys(self)

    def evaluate_float(self, x, terms: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Unguarded float path: ``(values, estimated_abs_error)``.

        Uses the piecewise local polynomials, or the raw terms if ``terms``.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self._f.evaluate(x) if terms else self._local.evaluate(x)

    def estimated_digits(self, values: np.ndarray, err: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            d = -np.log10(err / np.abs(values))
        d = np.where(err == 0, np.inf, d)
        return np.where((values == 0) & (err > 0), -np.inf, d)

    def flagged(self, values: np.ndarray, err: np.ndarray, policy: EvalPolicy) -> np.ndarray:
        bad = self.estimated_digits(values, err) < policy.min_digits
        if policy.atol > 0:
            bad &= err > policy.atol
        return bad

    def evaluate(self, x, policy: EvalPolicy | None = None):
        """Evaluate at ``x`` (scalar or array) under ``policy``.

        Rational mode returns a ``Fraction`` (scalar) or list of them.
        """
        policy = EvalPolicy() if policy is None else policy
        scalar = np.ndim(x) == 0 and not isinstance(x, (list, tuple))
        if policy.mode == "rational":
            if scalar:
                return self.evaluate_exact(x)
            return [self.evaluate_exact(v) for v in np.ravel(np.asarray(x, dtype=object))]
        xa = np.asarray(x, dtype=float)
        flat = np.atleast_1d(xa).ravel()
        values, err = self._local.evaluate(flat)
        bad = self.flagged(values, err, policy)
        if bad.any():
            idx = np.flatnonzero(bad)
            v2, e2 = self._f.evaluate(flat[idx])
            better = e2 < err[idx]
            values[idx[better]] = v2[better]
            err[idx[better]] = e2[better]
            bad = self.flagged(values, err, policy)
        if bad.any():
            idx = np.flatnonzero(bad)
            if not policy.fallback or self.n > policy.rational_n_max:
                digits = self.estimated_digits(values[idx[:1]], err[idx[:1]])[0]
                raise PrecisionError(
                    f"float evaluation keeps ~{max(digits, 0):.1f} digits at x={flat[idx[0]]!r} "
                    f"(n={self.n}, required {policy.min_digits}); "
                    f"exact fallback {'disabled' if not policy.fallback else 'over rational_n_max'}",
                    x=float(flat[idx[0]]), digits=float(digits),
                )
            for j in idx:
                values[j] = float(self.evaluate_exact(flat[j]))
        if scalar:
            return float(values[0])
        return values.reshape(xa.shape)

    # -- calculus ----------------------------------------------------------

    def antiderivative(self) -> PiecewiseSeries:
        """Series for ``integral_{support_lo}^x`` of this one, term by term.

        Each term must either vanish at its upper window edge or have that
        edge at the end of the support (true for every law in this package),
        so no constant needs to be carried past a window.
        """
        out: list[Term] = []
        for t in self.terms:
            if t.slope == 0:
                c = t.coeff_exact * t.shift ** t.power
                if t.window_hi != self.support_hi:
                    raise ValueError("constant term window must extend to the support end")
                out.append(Term.exact(c, -t.window_lo, 1, 1, t.window_lo, t.window_hi))
                continue
            if t.window_hi != self.support_hi and t.base_exact(t.window_hi) != 0:
                raise ValueError("term does not vanish at its window end; cannot integrate")
            c = t.coeff_exact / (t.slope * (t.power + 1))
            out.append(Term.exact(c, t.shift, t.slope, t.power + 1, t.window_lo, t.window_hi))
            at_lo = t.base_exact(t.window_lo) ** (t.power + 1)
            if at_lo != 0:
                out.append(Term.exact(-c * at_lo, 1, 0, 0, t.window_lo, self.support_hi))
        return PiecewiseSeries.build(out, self.prefactor_exact, (self.support_lo, self.support_hi),
                                     self.n, prefactor_log=self.prefactor)

    def reflected(self) -> PiecewiseSeries:
        """The same series as a function of ``s = 1 - x``."""
        terms = [
            Term(t.coeff, t.coeff_exact, t.shift + t.slope, -t.slope, t.power,
                 1 - t.window_hi, 1 - t.window_lo)
            for t in self.terms
        ]
        return PiecewiseSeries(tuple(terms), self.prefactor, self.prefactor_exact,
                               1 - self.support_hi, 1 - self.support_lo, self.n)

    def complement(self) -> PiecewiseSeries:
        """``1 - self`` on the support, held exactly."""
        one = Term.exact(1 / self.prefactor_exact, 1, 0, 0, self.support_lo, self.support_hi)
        neg = [Term(-t.coeff, -t.coeff_exact, t.shift, t.slope, t.power,
                    t.window_lo, t.window_hi) for t in self.terms]
        return PiecewiseSeries.build([one, *neg], self.prefactor_exact,
                                     (self.support_lo, self.support_hi), self.n,
                                     prefactor_log=self.prefactor)

    def with_prefactor(self, factor: Fraction) -> PiecewiseSeries:
        return PiecewiseSeries.build(self.terms, self.prefactor_exact * factor,
                                     (self.support_lo, self.support_hi), self.n, merge=False)

    # -- serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        def slog(v: SignedLog) -> dict:
            return {"sign": v.sign, "log_magnitude": v.log_magnitude if v.sign else None}

        return {
            "terms": [
                {
                    "coeff": slog(t.coeff),
                    "shift": float(t.shift),
                    "slope": float(t.slope),
                    "power": t.power,
                    "window_lo": float(t.window_lo),
                    "window_hi": float(t.window_hi),
                }
                for t in self.terms
            ],
            "prefactor": slog(self.prefactor),
            "support_lo": float(self.support_lo),
            "support_hi": float(self.support_hi),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _merge(terms: tuple[Term, ...]) -> tuple[Term, ...]:
    """Combine terms of identical shape exactly; drop exact zeros."""
    groups: dict[tuple, list[Term]] = {}
    for t in terms:
        key = (Fraction(1), Fraction(0), 0, t.window_lo, t.window_hi) if t.power == 0 else t.shape()
        groups.setdefault(key, []).append(t)
    out = []
    for key, group in groups.items():
        if len(group) == 1 and group[0].power != 0:
            if group[0].coeff_exact != 0:
                out.append(group[0])
            continue
        total = sum((t.coeff_exact for t in group), Fraction(0))
        if total != 0:
            out.append(Term.exact(total, *key))
    return tuple(out)


class _FloatTerms:
    """Float arrays derived once from a series' exact terms."""

    def __init__(self, s: PiecewiseSeries):
        ts = s.terms
        self.logc = np.array([t.coeff.log_magnitude for t in ts]) + s.prefactor.log_magnitude
        self.sign = np.array([t.coeff.sign * s.prefactor.sign for t in ts], dtype=float)
        self.shift = np.array([float(t.shift) for t in ts])
        self.slope = np.array([float(t.slope) for t in ts])
        self.power = np.array([t.power for t in ts])
        self.lo = np.array([float(t.window_lo) for t in ts])
        self.hi = np.array([float(t.window_hi) for t in ts])

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nt, m = len(self.logc), x.size
        if nt == 0:
            return np.zeros(m), np.zeros(m)
        X = x[None, :]
        p = self.power[:, None]
        base = self.shift[:, None] + self.slope[:, None] * X
        absb = np.abs(base)
        active = (X >= self.lo[:, None]) & (X <= self.hi[:, None])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logmag = self.logc[:, None] + np.where(p == 0, 0.0, p * np.log(absb))
            odd_neg = (base < 0) & (p % 2 == 1)
            sgn = self.sign[:, None] * np.where(odd_neg, -1.0, 1.0)
            live = active & ((p == 0) | (absb > 0))
            vals = np.where(live, sgn * np.exp(logmag), 0.0)
            # |shift + slope*x| is known to within delta; push that through the power
            delta = 2 * _EPS * (np.abs(self.shift[:, None]) + np.abs(self.slope[:, None] * X))
            upper = np.exp(self.logc[:, None] + p * np.log(absb + delta))
            base_err = np.where(p == 0, 0.0, (upper - np.abs(vals)) * (1 + 4 * p * _EPS))
            rel = _EPS * (np.abs(np.where(live, logmag, 0.0)) + 4)
            term_err = np.where(active, np.abs(vals) * rel + base_err, 0.0)
        total = _neumaier_sorted(vals)
        err = 2.0 * (term_err.sum(axis=0) + _EPS * np.abs(total))
        return total, err


class _LocalPolys:
    """Exact Taylor coefficients of the series on each piece, rounded once.

    Piece ``j`` spans ``(b_j, b_{j+1})`` between consecutive breakpoints.  It
    is expanded about three float centres: near its left end, its midpoint
    and its right end.  Each point uses the expansion with the smallest
    error bound, so a density vanishing to high order at a breakpoint keeps
    full relative accuracy next to it.  Values at breakpoints are stored
    exactly rounded, which also preserves the closed-window convention.
    """

    def __init__(self, s: PiecewiseSeries):
        bps = s.breakpoints_exact()
        self.degree = d = max((t.power for t in s.terms), default=0)
        pf = _q(s.prefactor_exact)
        centers, coeffs = [], []
        for lo, hi in zip(bps[:-1], bps[1:]):
            active = [q for q in s._q if q[4] <= lo and hi <= q[5]]
            row_c, row_k = [], []
            for m in (_inside(lo, hi, lo), Fraction(float((lo + hi) / 2)), _inside(lo, hi, hi)):
                mq = _q(m)
                c = [mpq(0)] * (d + 1)
                for cf, a, b, p, _, _ in active:
                    # (a + b m + b t)^p expanded in t
                    base = a + b * mq
                    pw = [mpq(1)]
                    for _ in range(p):
                        pw.append(pw[-1] * base)
                    bj = mpq(1)
                    for j in range(p + 1):
                        c[j] += cf * math.comb(p, j) * pw[p - j] * bj
                        bj *= b
                row_c.append(float(m))
                row_k.append([float(pf * v) for v in c])
            centers.append(row_c)
            coeffs.append(row_k)
        self.centers = np.array(centers).reshape(len(centers), 3)
        self.coeffs = np.array(coeffs).reshape(len(centers), 3, d + 1)
        self.bf = np.array([float(b) for b in bps])
        self.b_exact = np.array([Fraction(float(b)) == b for b in bps])
        self.b_down = np.array([Fraction(float(b)) < b for b in bps])
        self.b_value = np.array([float(s.evaluate_exact(b)) for b in bps])

    def _horner(self, j: np.ndarray, which: int, x: np.ndarray):
        t = x - self.centers[j, which]
        at = np.abs(t)
        v = self.coeffs[j, which, self.degree]
        bound = np.abs(v)
        for i in range(self.degree - 1, -1, -1):
            c = self.coeffs[j, which, i]
            v = v * t + c
            bound = bound * at + np.abs(c)
        # Horner, coefficient and argument rounding
        return v, (3 * self.degree + 4) * _EPS * bound + _EPS * np.abs(v)

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        bf, npieces = self.bf, len(self.centers)
        idx = np.searchsorted(bf, x, side="right") - 1
        at = (idx >= 0) & (x == bf[np.clip(idx, 0, None)])
        ia = idx[at]
        on_bp = np.zeros_like(at)
        on_bp[at] = self.b_exact[ia]
        shift_left = np.zeros_like(at)
        shift_left[at] = self.b_down[ia]
        idx = np.where(shift_left, idx - 1, idx)
        inside = (idx >= 0) & (idx < npieces) & ~on_bp

        values = np.zeros(x.size)
        err = np.zeros(x.size)
        j, xi = idx[inside], x[inside]
        v, e = self._horner(j, 0, xi)
        for which in (1, 2):
            v2, e2 = self._horner(j, which, xi)
            better = e2 < e
            v = np.where(better, v2, v)
            e = np.where(better, e2, e)
        values[inside] = v
        err[inside] = e
        bp = np.flatnonzero(on_bp)
        values[bp] = self.b_value[idx[bp]]
        err[bp] = _EPS * np.abs(values[bp])
        return values, err


def _inside(lo: Fraction, hi: Fraction, target: Fraction) -> Fraction:
    """The float nearest ``target`` that lies in ``[lo, hi]``."""
    f = Fraction(float(target))
    if f < lo:
        f = Fraction(np.nextafter(float(target), np.inf))
    elif f > hi:
        f = Fraction(np.nextafter(float(target), -np.inf))
    return f if lo <= f <= hi else Fraction(float((lo + hi) / 2))


def _neumaier_sorted(vals: np.ndarray) -> np.ndarray:
    """Column sums of ``vals``, added in increasing magnitude with compensation."""
    order = np.argsort(np.abs(vals), axis=0, kind="stable")
    sv = np.take_along_axis(vals, order, axis=0)
    s = np.zeros(vals.shape[1])
    c = np.zeros(vals.shape[1])
    for row in sv:
        t = s + row
        c += np.where(np.abs(s) >= np.abs(row), (s - t) + row, (row - t) + s)
        s = t
    return s + c


# ---------------------------------------------------------------------------
# distributions


def _gt(x: np.ndarray, q: Fraction) -> np.ndarray:
    """Exact ``x > q`` for floats ``x``."""
    f = float(q)
    return (x > f) | ((x == f) & (Fraction(f) > q))


def _lt(x: np.ndarray, q: Fraction) -> np.ndarray:
    """Exact ``x < q`` for floats ``x``."""
    f = float(q)
    return (x < f) | ((x == f) & (Fraction(f) < q))


@dataclass(frozen=True)
class SeriesDistribution:
    """A continuous law given by pdf and cdf series (and optionally a direct sf)."""

    name: str
    pdf_series: PiecewiseSeries
    cdf_series: PiecewiseSeries
    sf_series: PiecewiseSeries | None = None

    @property
    def support(self) -> tuple[float, float]:
        return self.pdf_series.support

    @property
    def n(self) -> int:
        return self.pdf_series.n

    def breakpoints(self) -> np.ndarray:
        return self.pdf_series.breakpoints()

    def _where(self, x, series, below, above, policy, lo_clip, hi_clip, closed=False):
        # closed: the endpoint values are known exactly (cdf/sf), skip the series there
        policy = EvalPolicy() if policy is None else policy
        lo, hi = self.pdf_series.support_lo, self.pdf_series.support_hi
        if policy.mode == "rational":
            def one(v):
                v = to_fraction(v)
                if v < lo or (closed and v == lo):
                    return Fraction(below)
                if v > hi or (closed and v == hi):
                    return Fraction(above)
                return series.evaluate_exact(v)

            if np.ndim(x) == 0 and not isinstance(x, (list, tuple)):
                return one(x)
            return [one(v) for v in np.ravel(np.asarray(x, dtype=object))]

        xa = np.asarray(x, dtype=float)
        flat = np.atleast_1d(xa).ravel()
        above_lo = _gt(flat, lo)
        out = np.where(above_lo, float(above), float(below))
        if closed:
            inside = above_lo & _lt(flat, hi)
        else:
            inside = ~_lt(flat, lo) & ~_gt(flat, hi)
        if inside.any():
            vals = np.asarray(series.evaluate(flat[inside], policy), dtype=float)
            out[inside] = self._clip(vals, flat[inside], policy, lo_clip, hi_clip)
        if np.ndim(x) == 0 and not isinstance(x, (list, tuple)):
            return float(out[0])
        return out.reshape(xa.shape)

    @staticmethod
    def _clip(vals, xs, policy, lo_clip, hi_clip):
        tol = policy.negative_tolerance
        if lo_clip is not None:
            low = vals < lo_clip
            if low.any():
                worst = np.argmin(vals)
                if vals[worst] < lo_clip - tol or not policy.clamp_negative_pdf:
                    raise PrecisionError(
                        f"computed value {vals[worst]!r} below {lo_clip} at x={xs[worst]!r}",
                        x=float(xs[worst]),
                    )
                vals = np.where(low, lo_clip, vals)
        if hi_clip is not None:
            high = vals > hi_clip
            if high.any():
                worst = np.argmax(vals)
                if vals[worst] > hi_clip + tol or not policy.clamp_negative_pdf:
                    raise PrecisionError(
                        f"computed probability {vals[worst]!r} above 1 at x={xs[worst]!r}",
                        x=float(xs[worst]),
                    )
                vals = np.where(high, hi_clip, vals)
        return vals

    def pdf(self, x, policy: EvalPolicy | None = None):
        return self._where(x, self.pdf_series, 0, 0, policy, 0.0, None)

    def cdf(self, x, policy: EvalPolicy | None = None):
        return self._where(x, self.cdf_series, 0, 1, policy, 0.0, 1.0, closed=True)

    def __post_init__(self):
        if self.sf_series is None:
            object.__setattr__(self, "sf_series", self.cdf_series.complement())

    def sf(self, x, policy: EvalPolicy | None = None):
        return self._where(x, self.sf_series, 1, 0, policy, 0.0, 1.0, closed=True)


@dataclass(frozen=True)
class PointMass:
    """Degenerate law: the statistic equals ``at`` with probability one."""

    at: float = 1.0
    name: str = "point mass"

    @property
    def support(self) -> tuple[float, float]:
        return self.at, self.at

    def breakpoints(self) -> np.ndarray:
        return np.array([self.at])

    def pdf(self, x, policy: EvalPolicy | None = None):
        raise DegenerateDistributionError(
            f"{self.name}: the statistic is identically {self.at}; it has no density", self
        )

    def cdf(self, x, policy: EvalPolicy | None = None):
        exact = policy is not None and policy.mode == "rational"
        if np.ndim(x) == 0 and not isinstance(x, (list, tuple)):
            v = 1 if to_fraction(x) >= to_fraction(self.at) else 0
            return Fraction(v) if exact else float(v)
        xa = np.asarray(x, dtype=float)
        return (xa >= self.at).astype(float)

    def sf(self, x, policy: EvalPolicy | None = None):
        exact = policy is not None and policy.mode == "rational"
        if np.ndim(x) == 0 and not isinstance(x, (list, tuple)):
            v = 1 if to_fraction(x) <= to_fraction(self.at) else 0
            return Fraction(v) if exact else float(v)
        xa = np.asarray(x, dtype=float)
        return (xa <= self.at).astype(float)
