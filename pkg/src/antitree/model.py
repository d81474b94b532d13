"""Radially symmetric metric antitrees and their weight profiles.

An antitree is fixed by its sphere counts ``s_0 = 1, s_1, s_2, ...`` and the
common length ``ell_n`` of the edges joining sphere ``n`` to sphere ``n+1``.
All radial analysis happens through the piecewise-constant weight

    mu(t) = s_n * s_{n+1}   on  [t_n, t_{n+1}),   t_n = ell_0 + ... + ell_{n-1}.

This module realizes truncated profiles, the partial sums of the two key
functionals (volume ``sum mu_n ell_n`` and dual length ``sum ell_n / mu_n``)
and symbolic convergence verdicts for the built-in generator families.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .tails import Asym, power_tail_bounds

INF = math.inf


class InvalidSpecError(ValueError):
    """A generator produced an inadmissible sphere count or edge length."""


# ---------------------------------------------------------------------------
# sphere-number generators


@dataclass(frozen=True)
class ExplicitSpheres:
    """Finite prefix of sphere counts; nothing is known beyond the data."""

    values: tuple[int, ...]

    def __post_init__(self):
        if not self.values or self.values[0] != 1:
            raise InvalidSpecError("sphere counts must start with s_0 = 1")
        if any((not isinstance(v, int)) or v < 1 for v in self.values):
            raise InvalidSpecError("sphere counts must be integers >= 1")

    def sphere(self, n: int) -> int:
        if n >= len(self.values):
            raise InvalidSpecError(
                f"explicit sphere data ends at index {len(self.values) - 1}, "
                f"index {n} requested")
        return self.values[n]

    def weight_asym(self):
        return None

    def nondecreasing(self):
        return None

    def skip_ratios_eventually(self):
        return None


@dataclass(frozen=True)
class ExponentialSpheres:
    """s_n = beta^n for an integer base beta >= 2."""

    beta: int

    def __post_init__(self):
        if not isinstance(self.beta, int) or self.beta < 2:
            raise InvalidSpecError("exponential base must be an integer >= 2")

    def sphere(self, n: int) -> int:
        return self.beta ** n

    def weight_asym(self) -> Asym:
        return Asym(rho=float(self.beta) ** 2)

    def nondecreasing(self) -> bool:
        return True

    def skip_ratios_eventually(self) -> tuple[float, ...]:
        # s_{n+2}/s_n is constant
        return (float(self.beta) ** 2,)


@dataclass(frozen=True)
class PolynomialSpheres:
    """s_n = (n+1)^q for an integer exponent q >= 1."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 1:
            raise InvalidSpecError("polynomial exponent must be an integer >= 1")

    def sphere(self, n: int) -> int:
        return (n + 1) ** self.q

    def weight_asym(self) -> Asym:
        return Asym(power=2.0 * self.q)

    def nondecreasing(self) -> bool:
        return True

    def skip_ratios_eventually(self) -> tuple[float, ...]:
        # ratios (n+3)^q/(n+1)^q decrease to 1
        return (1.0,)


@dataclass(frozen=True)
class AlternatingSpheres:
    """s_0 = 1 and s_n = pattern[(n-1) mod len(pattern)] for n >= 1."""

    pattern: tuple[int, ...]

    def __post_init__(self):
        if not self.pattern:
            raise InvalidSpecError("alternating pattern must be nonempty")
        if any((not isinstance(v, int)) or v < 1 for v in self.pattern):
            raise InvalidSpecError("pattern entries must be integers >= 1")

    def sphere(self, n: int) -> int:
        if n == 0:
            return 1
        return self.pattern[(n - 1) % len(self.pattern)]

    def weight_asym(self) -> Asym:
        # weights are eventually periodic, hence bounded between constants
        return Asym()

    def nondecreasing(self) -> bool:
        return len(set(self.pattern)) == 1

    def skip_ratios_eventually(self) -> tuple[float, ...]:
        L = len(self.pattern)
        return tuple(self.pattern[(i + 2) % L] / self.pattern[i % L]
                     for i in range(L))

    def weight_bounds(self) -> tuple[int, int]:
        pat = (1,) + self.pattern
        prods = [self.sphere(n) * self.sphere(n + 1)
                 for n in range(2 * len(self.pattern) + 2)]
        del pat
        return min(prods), max(prods)


# ---------------------------------------------------------------------------
# edge-length generators


@dataclass(frozen=True)
class ExplicitLengths:
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values or any(not (v > 0) or not math.isfinite(v)
                                  for v in self.values):
            raise InvalidSpecError("explicit lengths must be positive finite reals")

    def length(self, n: int) -> float:
        if n >= len(self.values):
            raise InvalidSpecError(
                f"explicit length data ends at index {len(self.values) - 1}, "
                f"index {n} requested")
        return self.values[n]

    def length_asym(self):
        return None

    min_positive = staticmethod(lambda: None)
    to_zero = staticmethod(lambda: None)
    le_one = staticmethod(lambda: None)


@dataclass(frozen=True)
class ConstantLength:
    ell: float

    def __post_init__(self):
        if not (self.ell > 0) or not math.isfinite(self.ell):
            raise InvalidSpecError("constant length must be positive and finite")

    def length(self, n: int) -> float:
        return self.ell

    def length_asym(self) -> Asym:
        return Asym()

    def min_positive(self) -> bool:
        return True

    def to_zero(self) -> bool:
        return False

    def le_one(self) -> bool:
        return self.ell <= 1.0


@dataclass(frozen=True)
class PowerLength:
    """ell_n = (n+1)^(-s) with decay exponent s >= 0."""

    s: float

    def __post_init__(self):
        if not (self.s >= 0) or not math.isfinite(self.s):
            raise InvalidSpecError("power-length exponent must satisfy s >= 0")

    def length(self, n: int) -> float:
        return float(n + 1) ** (-self.s)

    def length_asym(self) -> Asym:
        return Asym(power=-self.s)

    def min_positive(self) -> bool:
        return self.s == 0.0

    def to_zero(self) -> bool:
        return self.s > 0.0

    def le_one(self) -> bool:
        return True


@dataclass(frozen=True)
class CustomLength:
    """Callback-defined lengths, optionally with a declared tail shape."""

    fn: Callable[[int], float]
    asym: Asym | None = None

    def length(self, n: int) -> float:
        v = float(self.fn(n))
        if not (v > 0) or not math.isfinite(v):
            raise InvalidSpecError(f"custom length callback gave {v!r} at n={n}")
        return v

    def length_asym(self) -> Asym | None:
        return self.asym

    min_positive = staticmethod(lambda: None)
    to_zero = staticmethod(lambda: None)
    le_one = staticmethod(lambda: None)


SphereGen = ExplicitSpheres | ExponentialSpheres | PolynomialSpheres | AlternatingSpheres
LengthGen = ExplicitLengths | ConstantLength | PowerLength | CustomLength


# ---------------------------------------------------------------------------
# the spec and its derived tail knowledge


@dataclass(frozen=True)
class AntitreeSpec:
    spheres: SphereGen
    lengths: LengthGen

    def sphere(self, n: int) -> int:
        s = self.spheres.sphere(n)
        if n == 0 and s != 1:
            raise InvalidSpecError("the root sphere count s_0 must equal 1")
        if not isinstance(s, int) or s < 1:
            raise InvalidSpecError(f"sphere count {s!r} at n={n} is not an integer >= 1")
        return s

    def length(self, n: int) -> float:
        return self.lengths.length(n)

    def weight(self, n: int) -> int:
        """mu_n = s_n * s_{n+1}, kept in exact integer arithmetic."""
        return self.sphere(n) * self.sphere(n + 1)

    # -- term shapes ------------------------------------------------------

    def weight_asym(self) -> Asym | None:
        return self.spheres.weight_asym()

    def length_asym(self) -> Asym | None:
        return self.lengths.length_asym()

    def vol_term_asym(self) -> Asym | None:
        w, l = self.weight_asym(), self.length_asym()
        return None if w is None or l is None else w * l

    def dual_term_asym(self) -> Asym | None:
        w, l = self.weight_asym(), self.length_asym()
        if w is None or l is None:
            return None
        return Asym(1.0 / w.rho, -w.power, -w.logpow) * l

    # -- certified numeric tails ------------------------------------------

    def dual_tail_bracket(self, n: int) -> tuple[float, float] | None:
        """Two-sided bound on sum_{k>=n} ell_k/mu_k, or None if uncertified.

        (inf, inf) signals a certified divergent tail.
        """
        sph, lng = self.spheres, self.lengths
        asym = self.dual_term_asym()
        if asym is not None and not asym.series_converges():
            return INF, INF

        if isinstance(sph, ExponentialSpheres):
            b2 = float(sph.beta) ** 2
            if isinstance(lng, ConstantLength):
                first = lng.ell / self.weight(n)
                return first / (1.0 - 1.0 / b2), first / (1.0 - 1.0 / b2)
            if isinstance(lng, PowerLength):
                first = self.length(n) / self.weight(n)
                return first, first / (1.0 - 1.0 / b2)
            return None

        if isinstance(sph, PolynomialSpheres):
            q = sph.q
            sigma = lng.s if isinstance(lng, PowerLength) else 0.0
            if isinstance(lng, ConstantLength):
                scale = lng.ell
            elif isinstance(lng, PowerLength):
                scale = 1.0
            else:
                return None
            # (k+2)^(-2q-sigma) <= ell_k/mu_k/scale <= (k+1)^(-2q-sigma)
            p = 2.0 * q + sigma
            lo = power_tail_bounds(p, 2.0, n)[0]
            hi = power_tail_bounds(p, 1.0, n)[1]
            return scale * lo, scale * hi

        if isinstance(sph, AlternatingSpheres):
            mu_lo, mu_hi = sph.weight_bounds()
            lt = self.length_tail_bracket(n)
            if lt is None:
                return None
            if lt[0] == INF:
                return INF, INF
            return lt[0] / mu_hi, lt[1] / mu_lo

        return None

    def length_tail_bracket(self, n: int) -> tuple[float, float] | None:
        """Two-sided bound on sum_{k>=n} ell_k (inf,inf if divergent)."""
        lng = self.lengths
        if isinstance(lng, ConstantLength):
            return INF, INF
        if isinstance(lng, PowerLength):
            if lng.s <= 1.0:
                return INF, INF
            return power_tail_bounds(lng.s, 1.0, n)
        asym = self.length_asym()
        if asym is not None and not asym.series_converges():
            return INF, INF
        return None

    def vol_tail_bracket(self, n: int) -> tuple[float, float] | None:
        """Two-sided bound on sum_{k>=n} mu_k ell_k (inf,inf if divergent)."""
        asym = self.vol_term_asym()
        if asym is not None and not asym.series_converges():
            return INF, INF
        sph, lng = self.spheres, self.lengths
        if isinstance(sph, PolynomialSpheres) and isinstance(lng, PowerLength):
            q, sigma = sph.q, lng.s
            if sigma - 2 * q <= 1.0:
                return INF, INF
            lo = power_tail_bounds(sigma - 2 * q, 1.0, n)[0]
            hi = 2.0 ** (sigma - q) * power_tail_bounds(sigma - 2 * q, 2.0, n)[1]
            return lo, hi
        if isinstance(sph, AlternatingSpheres):
            mu_lo, mu_hi = sph.weight_bounds()
            lt = self.length_tail_bracket(n)
            if lt is None:
                return None
            if lt[0] == INF:
                return INF, INF
            return mu_lo * lt[0], mu_hi * lt[1]
        return None

    # -- geometry flags (True/False certified, None unknown) --------------

    def lengths_min_positive(self) -> bool | None:
        return self.lengths.min_positive()

    def lengths_to_zero(self) -> bool | None:
        return self.lengths.to_zero()

    def lengths_le_one(self) -> bool | None:
        return self.lengths.le_one()

    def lengths_sup_infinite(self) -> bool | None:
        asym = self.length_asym()
        if asym is None:
            return None
        return asym.limit_kind().name == "INFINITE"

    def spheres_nondecreasing(self) -> bool | None:
        return self.spheres.nondecreasing()

    def skip_ratios_eventually(self) -> tuple[float, ...] | None:
        """Eventual value set of s_{n+2}/s_n, when the family pins it down."""
        return self.spheres.skip_ratios_eventually()


# ---------------------------------------------------------------------------
# realized profiles


@dataclass(frozen=True)
class MetricProfile:
    """Truncated realization with N+1 weighted intervals I_0 ... I_N."""

    N: int
    t: tuple[float, ...]      # breakpoints t_0 = 0 < ... < t_{N+1}
    mu: tuple[int, ...]       # integer weights mu_0 ... mu_N
    s: tuple[int, ...]        # sphere counts s_0 ... s_{N+1}
    vol_prefix: tuple[float, ...] = field(repr=False)
    dual_prefix: tuple[float, ...] = field(repr=False)

    @property
    def total_length(self) -> float:
        return self.t[-1]

    def interval_length(self, n: int) -> float:
        return self.t[n + 1] - self.t[n]

    def lengths(self) -> tuple[float, ...]:
        return tuple(self.t[n + 1] - self.t[n] for n in range(self.N + 1))


def _compensated_prefix(terms: Sequence[float]) -> tuple[float, ...]:
    # Neumaier running sums: mu_n grows geometrically for exponential spheres
    out = []
    s = 0.0
    c = 0.0
    for x in terms:
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        out.append(s + c)
    return tuple(out)


def build_profile(spec: AntitreeSpec, N: int) -> MetricProfile:
    """Realize spheres s_0..s_{N+1}, breakpoints t_0..t_{N+1}, weights mu_0..mu_N.

    N = 0 realizes a single generation (one weighted interval).
    """
    if N < 0:
        raise InvalidSpecError("truncation depth must satisfy N >= 0")
    s = tuple(spec.sphere(n) for n in range(N + 2))
    ell = tuple(spec.length(n) for n in range(N + 1))
    mu = tuple(s[n] * s[n + 1] for n in range(N + 1))
    t = [0.0]
    for l in ell:
        t.append(t[-1] + l)
    if any(t[i + 1] <= t[i] for i in range(N + 1)):
        raise InvalidSpecError("breakpoints must be strictly increasing")
    vol_prefix = _compensated_prefix([m * l for m, l in zip(mu, ell)])
    dual_prefix = _compensated_prefix([l / m for m, l in zip(mu, ell)])
    return MetricProfile(N=N, t=tuple(t), mu=mu, s=s,
                         vol_prefix=vol_prefix, dual_prefix=dual_prefix)


def partial_volume(profile: MetricProfile, n: int) -> float:
    """sum_{k<=n} s_k s_{k+1} ell_k."""
    if not 0 <= n <= profile.N:
        raise IndexError(f"generation index {n} outside 0..{profile.N}")
    return profile.vol_prefix[n]


def partial_dual_length(profile: MetricProfile, n: int) -> float:
    """sum_{k<=n} ell_k / (s_k s_{k+1})."""
    if not 0 <= n <= profile.N:
        raise IndexError(f"generation index {n} outside 0..{profile.N}")
    return profile.dual_prefix[n]


# ---------------------------------------------------------------------------
# series classification


class SeriesStatus(enum.Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SeriesVerdict:
    status: SeriesStatus
    partial_sum: float
    terms_used: int
    rationale: str  # "symbolic-tail" or "partial-sum-only"


def _verdict(asym: Asym | None, terms: Sequence[float]) -> SeriesVerdict:
    partial = math.fsum(terms)
    if asym is None:
        return SeriesVerdict(SeriesStatus.INCONCLUSIVE, partial, len(terms),
                             "partial-sum-only")
    status = (SeriesStatus.CONVERGES if asym.series_converges()
              else SeriesStatus.DIVERGES)
    return SeriesVerdict(status, partial, len(terms), "symbolic-tail")


def classify_series(spec: AntitreeSpec, probe_terms: int = 64
                    ) -> tuple[SeriesVerdict, SeriesVerdict, SeriesVerdict]:
    """Verdicts for (total volume, dual length, total length).

    Built-in families are decided from their tail shape; explicit or custom
    data without a declared tail yields Inconclusive with the partial sum
    attached.  Convergence of an infinite series is never inferred from
    finitely many numeric terms.
    """
    n_terms = probe_terms
    if isinstance(spec.spheres, ExplicitSpheres):
        n_terms = min(n_terms, len(spec.spheres.values) - 1)
    if isinstance(spec.lengths, ExplicitLengths):
        n_terms = min(n_terms, len(spec.lengths.values))
    n_terms = max(n_terms, 1)
    mu = [spec.weight(k) for k in range(n_terms)]
    ell = [spec.length(k) for k in range(n_terms)]
    vol = _verdict(spec.vol_term_asym(), [m * l for m, l in zip(mu, ell)])
    dual = _verdict(spec.dual_term_asym(), [l / m for m, l in zip(mu, ell)])
    length = _verdict(spec.length_asym(), ell)
    return vol, dual, length
