"""Symbolic tail machinery for series built from closed-form generators.

Every series this package has to judge is built from terms of the shape
``C * rho**n * n**power * log(n)**logpow`` with ``C > 0``.  Convergence,
partial-sum growth and tail decay of such series are decidable exactly from
the exponents, without ever looking at a numeric threshold.  The helpers
below also provide certified two-sided numeric brackets for power-law and
geometric tails (integral test), used wherever a report carries actual tail
numbers instead of just a verdict.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class LimitKind(enum.Enum):
    ZERO = "zero"
    FINITE = "finite"  # positive finite limit, value not tracked
    INFINITE = "infinite"


@dataclass(frozen=True)
class Asym:
    """Shape of a positive sequence: a_n ~ C * rho^n * n^power * log(n)^logpow."""

    rho: float = 1.0
    power: float = 0.0
    logpow: int = 0

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    def __mul__(self, other: "Asym") -> "Asym":
        return Asym(self.rho * other.rho, self.power + other.power,
                    self.logpow + other.logpow)

    def series_converges(self) -> bool:
        """Whether the series with these terms converges."""
        if self.rho < 1.0:
            return True
        if self.rho > 1.0:
            return False
        if self.power < -1.0:
            return True
        if self.power > -1.0:
            return False
        # power == -1: log refinement (Bertrand series)
        return self.logpow < -1

    def partial_sum_asym(self) -> "Asym":
        """Growth of partial sums; only meaningful for divergent series."""
        if self.series_converges():
            raise ValueError("partial sums of a convergent series are bounded")
        if self.rho > 1.0:
            return Asym(self.rho, self.power, self.logpow)
        if self.power > -1.0:
            return Asym(1.0, self.power + 1.0, self.logpow)
        # power == -1 and logpow >= -1
        return Asym(1.0, 0.0, self.logpow + 1)

    def tail_asym(self) -> "Asym":
        """Decay of tails sum_{k>=n}; only meaningful for convergent series."""
        if not self.series_converges():
            raise ValueError("tail of a divergent series is infinite")
        if self.rho < 1.0:
            return Asym(self.rho, self.power, self.logpow)
        return Asym(1.0, self.power + 1.0, self.logpow)

    def limit_kind(self) -> LimitKind:
        if self.rho < 1.0:
            return LimitKind.ZERO
        if self.rho > 1.0:
            return LimitKind.INFINITE
        if self.power < 0.0:
            return LimitKind.ZERO
        if self.power > 0.0:
            return LimitKind.INFINITE
        if self.logpow < 0:
            return LimitKind.ZERO
        if self.logpow > 0:
            return LimitKind.INFINITE
        return LimitKind.FINITE


def power_tail_bounds(p: float, a: float, n: int) -> tuple[float, float]:
    """Certified bracket for sum_{k>=n} (k+a)^(-p) with p > 1, k+a > 0.

    Integral test for the decreasing integrand:
    integral_n^inf <= sum <= f(n) + integral_n^inf.
    """
    if p <= 1.0:
        raise ValueError("power tail requires exponent > 1")
    base = (n + a) ** (1.0 - p) / (p - 1.0)
    return base, base + (n + a) ** (-p)


def geometric_tail(ratio: float, first_term: float) -> float:
    """Exact tail first_term * (1 + r + r^2 + ...) for 0 <= r < 1."""
    if not 0.0 <= ratio < 1.0:
        raise ValueError("geometric ratio must lie in [0, 1)")
    return first_term / (1.0 - ratio)


def zeta(p: float, terms: int = 20000) -> float:
    """Riemann zeta for p > 1 by direct summation plus Euler-Maclaurin tail.

    The correction after K terms is K^(1-p)/(p-1) - K^(-p)/2 + p*K^(-p-1)/12
    with error below p(p+1)(p+2)/720 * K^(-p-3); for the default K this is
    far under 1e-10 for every p > 1.
    """
    if p <= 1.0:
        raise ValueError("zeta(p) requires p > 1")
    K = terms
    head = math.fsum((1.0 / k) ** p for k in range(1, K + 1))
    tail = K ** (1.0 - p) / (p - 1.0) - 0.5 * K ** (-p) + p / 12.0 * K ** (-p - 1.0)
    err = p * (p + 1.0) * (p + 2.0) / 720.0 * K ** (-p - 3.0)
    if err > 1e-10:
        raise ArithmeticError("zeta remainder bound not met; raise the term count")
    return head + tail
