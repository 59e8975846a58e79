"""Combinatorial coefficients of the sum-of-smallest-spacings series.

The density of the sum of the ``k`` smallest of the ``N + 1`` spacings is

    A(k, N) * sum_i a(i, k) * [1 - (N+2-i)/(k+1-i) * s]^(N-1) * H(...)

with

    A(k, N) = N (N+1)! / ((N+1-k)^(k-1) (N+1-k)!)
    a(i, k) = (-1)^(i-1) (k+1-i)^(k-2) / ((k-i)! (i-1)!)

Both are exposed in two representations: a signed logarithm (fast path,
never overflows) and an exact :class:`fractions.Fraction` (validation path).
"""

from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, NamedTuple

from .errors import DomainError

__all__ = [
    "SignedLog",
    "CoefficientValue",
    "CoefficientTable",
    "RecursionFailure",
    "RecursionReport",
    "coeff_A",
    "coeff_a",
    "coefficient_table",
    "verify_recursions",
]

ExactRational = Fraction
Mode = Literal["log", "rational"]


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign == 0`` is exact zero; ``log_magnitude`` is then ignored and kept
    at ``-inf`` so that equality is well defined.
    """

    sign: int
    log_magnitude: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0 and self.log_magnitude != -math.inf:
            object.__setattr__(self, "log_magnitude", -math.inf)
        elif self.log_magnitude == 0:
            object.__setattr__(self, "log_magnitude", 0.0)  # no -0.0

    @classmethod
    def zero(cls) -> SignedLog:
        return cls(0, -math.inf)

    @classmethod
    def from_float(cls, value: float) -> SignedLog:
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_fraction(cls, value: Fraction) -> SignedLog:
        if value == 0:
            return cls.zero()
        # math.log accepts arbitrarily large ints without overflow
        mag = math.log(abs(value.numerator)) - math.log(value.denominator)
        return cls(1 if value > 0 else -1, mag)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __neg__(self) -> SignedLog:
        return SignedLog(-self.sign, self.log_magnitude)

    def __mul__(self, other: SignedLog) -> SignedLog:
        if self.sign == 0 or other.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: SignedLog) -> SignedLog:
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLog")
        if self.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.log_magnitude - other.log_magnitude)

    def __add__(self, other: SignedLog) -> SignedLog:
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        big, small = (self, other) if self.log_magnitude >= other.log_magnitude else (other, self)
        d = small.log_magnitude - big.log_magnitude
        if big.sign == small.sign:
            return SignedLog(big.sign, big.log_magnitude + math.log1p(math.exp(d)))
        if d == 0:
            return SignedLog.zero()
        return SignedLog(big.sign, big.log_magnitude + math.log1p(-math.exp(d)))

    def __sub__(self, other: SignedLog) -> SignedLog:
        return self + (-other)


class CoefficientValue(NamedTuple):
    log: SignedLog
    exact: Fraction

    @property
    def value(self) -> float:
        return float(self.exact)


def _check_A(k: int, n: int) -> None:
    if n < 1:
        raise DomainError(f"A(k, N) needs N >= 1, got N={n}")
    if not 1 <= k <= n:
        raise DomainError(f"A(k, N) needs 1 <= k <= N, got k={k}, N={n}")


def _check_a(i: int, k: int) -> None:
    if not 1 <= i <= k:
        raise DomainError(f"a(i, k) needs 1 <= i <= k, got i={i}, k={k}")


@functools.lru_cache(maxsize=None)
def _A_exact(k: int, n: int) -> Fraction:
    return Fraction(n * math.factorial(n + 1), (n + 1 - k) ** (k - 1) * math.factorial(n + 1 - k))


@functools.lru_cache(maxsize=None)
def _a_exact(i: int, k: int) -> Fraction:
    # k = 1 gives 1**-1, the empty-product convention a(1, 1) = 1
    mag = Fraction(k + 1 - i) ** (k - 2) / (math.factorial(k - i) * math.factorial(i - 1))
    return mag if (i - 1) % 2 == 0 else -mag


def _A_log(k: int, n: int) -> SignedLog:
    mag = (
        math.log(n)
        + math.lgamma(n + 2)
        - (k - 1) * math.log(n + 1 - k)
        - math.lgamma(n + 2 - k)
    )
    return SignedLog(1, mag)


def _a_log(i: int, k: int) -> SignedLog:
    mag = (k - 2) * math.log(k + 1 - i) - math.lgamma(k - i + 1) - math.lgamma(i)
    return SignedLog(1 if (i - 1) % 2 == 0 else -1, mag)


def coeff_A(k: int, n: int, mode: Mode = "log") -> SignedLog | Fraction:
    """Normalising prefactor ``A(k, N)``; defined for ``1 <= k <= N``.

    ``k = N + 1`` is rejected: the factor ``(N+1-k)^(k-1)`` vanishes there and
    the statistic it would describe (the sum of all spacings) is the constant 1.
    """
    _check_A(k, n)
    if mode == "rational":
        return _A_exact(k, n)
    if mode == "log":
        return _A_log(k, n)
    raise ValueError(f"unknown mode {mode!r}")


def coeff_a(i: int, k: int, mode: Mode = "log") -> SignedLog | Fraction:
    """Alternating series weight ``a(i, k)``; sign is ``(-1)^(i-1)``."""
    _check_a(i, k)
    if mode == "rational":
        return _a_exact(i, k)
    if mode == "log":
        return _a_log(i, k)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class CoefficientTable:
    """All ``A(k, n)`` for ``k <= min(k_max, n)`` and ``a(i, k)`` for ``k <= k_max``."""

    n: int
    k_max: int
    A: dict[int, CoefficientValue] = field(repr=False)
    a: dict[tuple[int, int], CoefficientValue] = field(repr=False)

    def to_csv(self) -> str:
        """Debug dump; ``coefficient`` is ``A`` (column ``i`` empty) or ``a``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["coefficient", "i", "k", "sign", "log_magnitude", "numerator", "denominator"])
        for k, v in sorted(self.A.items()):
            w.writerow(["A", "", k, v.log.sign, repr(v.log.log_magnitude),
                        v.exact.numerator, v.exact.denominator])
        for (i, k), v in sorted(self.a.items(), key=lambda item: (item[0][1], item[0][0])):
            w.writerow(["a", i, k, v.log.sign, repr(v.log.log_magnitude),
                        v.exact.numerator, v.exact.denominator])
        return buf.getvalue()


@functools.lru_cache(maxsize=256)
def coefficient_table(n: int, k_max: int) -> CoefficientTable:
    """Build (once per ``(n, k_max)``) the coefficient table for sample count ``n``."""
    if n < 1 or k_max < 1:
        raise DomainError(f"need n >= 1 and k_max >= 1, got n={n}, k_max={k_max}")
    A = {k: CoefficientValue(_A_log(k, n), _A_exact(k, n)) for k in range(1, min(k_max, n) + 1)}
    a = {
        (i, k): CoefficientValue(_a_log(i, k), _a_exact(i, k))
        for k in range(1, k_max + 1)
        for i in range(1, k + 1)
    }
    return CoefficientTable(n=n, k_max=k_max, A=A, a=a)


@dataclass(frozen=True)
class RecursionFailure:
    identity: str
    i: int | None
    k: int
    n: int | None
    lhs: Fraction
    rhs: Fraction


@dataclass
class RecursionReport:
    k_max: int
    n_max: int
    checked: dict[str, int]
    failure: RecursionFailure | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def verify_recursions(k_max: int, n_max: int | None = None) -> RecursionReport:
    """Check the coefficient recursions exactly, for ``2 <= k <= k_max``.

    R1  a(i,k) = -a(i-1,k-1) (k+1-i)/(i-1)                      2 <= i <= k
    R2  a(i,k) = (-1)^(i-1) (k+1-i)^(i-1) a(1,k+1-i) / (i-1)!
    R3  sum_{i<k} a(i,k-1) (k-i)/i = a(1,k)
    R4  A(k,N) = A(k-1,N-1) N(N+1) / ((N-1)(N+1-k))              k <= N <= n_max

    Stops at the first violated identity and records it in ``failure``.
    """
    if k_max < 2:
        raise DomainError(f"k_max must be >= 2, got {k_max}")
    n_max = 2 * k_max if n_max is None else n_max
    report = RecursionReport(k_max, n_max, {"R1": 0, "R2": 0, "R3": 0, "R4": 0})

    def fail(name, i, k, n, lhs, rhs):
        report.failure = RecursionFailure(name, i, k, n, lhs, rhs)
        return report

    a = _a_exact
    for k in range(2, k_max + 1):
        for i in range(2, k + 1):
            rhs = -a(i - 1, k - 1) * Fraction(k + 1 - i, i - 1)
            if a(i, k) != rhs:
                return fail("R1", i, k, None, a(i, k), rhs)
            report.checked["R1"] += 1
        for i in range(1, k + 1):
            rhs = (-1) ** (i - 1) * Fraction(k + 1 - i) ** (i - 1) * a(1, k + 1 - i) / math.factorial(i - 1)
            if a(i, k) != rhs:
                return fail("R2", i, k, None, a(i, k), rhs)
            report.checked["R2"] += 1
        lhs = sum((a(i, k - 1) * Fraction(k - i, i) for i in range(1, k)), Fraction(0))
        if lhs != a(1, k):
            return fail("R3", None, k, None, lhs, a(1, k))
        report.checked["R3"] += 1
        for n in range(max(k, 2), n_max + 1):
            rhs = _A_exact(k - 1, n - 1) * Fraction(n * (n + 1), (n - 1) * (n + 1 - k))
            if _A_exact(k, n) != rhs:
                return fail("R4", None, k, n, _A_exact(k, n), rhs)
            report.checked["R4"] += 1
    return report
