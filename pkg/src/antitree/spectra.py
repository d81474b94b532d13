"""Eigenvalues of the decomposed blocks of the antitree Kirchhoff Laplacian.

The operator on a radially symmetric antitree splits into an orthogonal sum:

* one radial Sturm-Liouville block ``-(1/mu)(mu f')'`` on ``[0, L)`` with a
  Neumann condition at the root (``sym``),
* Dirichlet-Dirichlet second-derivative cells on single intervals ``I_n``
  with multiplicity ``(s_n - 1)(s_{n+1} - 1)`` (``cell``),
* two-interval blocks on ``I_{n-1} u I_n`` with the interface condition
  ``s_{n-1} f'(t_n-) = s_{n+1} f'(t_n+)`` and Dirichlet ends, multiplicity
  ``s_n - 1`` (``bridge``),
* under truncation of the graph at sphere ``N+1``, one extra family of cells
  on the last interval (``boundary_cell``), an artifact of cutting the graph
  that the finite-element reference solver validates.

Cells have the closed-form spectrum ``pi^2 k^2 / ell_n^2``.  Bridge
eigenvalues are the positive zeros of the secular function

    d(lam) = s_next cos(z l_next) sin(z l_prev)
           + s_prev cos(z l_prev) sin(z l_next),      z = sqrt(lam),

located here through an exact monotone phase representation, so no zero can
be missed even when close pairs occur.  The radial block is handled by a
modified Pruefer angle whose advance across a constant-weight interval is
exactly ``z * ell_n``; eigenvalue extraction is bisection on the oscillation
count followed by a polish on the boundary functional evaluated via transfer
matrices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import AntitreeSpec, MetricProfile, PolynomialSpheres, PowerLength, \
    build_profile
from .tails import zeta

PI = math.pi


class InternalConsistencyError(RuntimeError):
    """A certified bound was violated; signals a bug, not bad input."""


# ---------------------------------------------------------------------------
# boundary conditions


class BCKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"


@dataclass(frozen=True)
class BoundaryCondition:
    """Right-endpoint condition cos(theta) f + sin(theta) (mu f') = 0.

    theta = 0 is Dirichlet, theta = pi/2 is Neumann.  Use the named
    constructors so the two classical cases carry their exact kind.
    """

    kind: BCKind
    theta: float

    @staticmethod
    def dirichlet() -> "BoundaryCondition":
        return BoundaryCondition(BCKind.DIRICHLET, 0.0)

    @staticmethod
    def neumann() -> "BoundaryCondition":
        return BoundaryCondition(BCKind.NEUMANN, PI / 2)

    @staticmethod
    def robin(theta: float) -> "BoundaryCondition":
        if not 0.0 <= theta < PI:
            raise ValueError("Robin parameter must lie in [0, pi)")
        if theta == 0.0:
            return BoundaryCondition.dirichlet()
        if theta == PI / 2:
            return BoundaryCondition.neumann()
        return BoundaryCondition(BCKind.ROBIN, theta)


# ---------------------------------------------------------------------------
# cells


def cell_eigenvalues(ell: float, k_max: int) -> list[float]:
    """Dirichlet-Dirichlet spectrum pi^2 k^2 / ell^2 for k = 1..k_max."""
    if not ell > 0:
        raise ValueError("cell length must be positive")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    return [(PI * k / ell) ** 2 for k in range(1, k_max + 1)]


# ---------------------------------------------------------------------------
# bridges


def bridge_secular(s_prev: int, s_next: int, l_prev: float, l_next: float,
                   lam: float) -> float:
    """Secular function whose positive zeros are the bridge eigenvalues."""
    if lam < 0:
        raise ValueError("secular function is defined for lam >= 0")
    z = math.sqrt(lam)
    return (s_next * math.cos(z * l_next) * math.sin(z * l_prev)
            + s_prev * math.cos(z * l_prev) * math.sin(z * l_next))


def _bridge_phase(s_prev: int, s_next: int, l_prev: float, l_next: float):
    """Return (theta, rate_hi) where theta(z) is a strictly increasing phase
    with 2*d(z^2) = R(z) sin(theta(z)), R > 0.

    With (after an exchange making l_prev >= l_next) a = s_next - s_prev,
    b = s_next + s_prev, delta = l_prev - l_next:

        2 d = a sin(delta z) + b sin((l_prev + l_next) z)
            = Im[ e^{i delta z} (a + b e^{2 i l_next z}) ],

    so theta(z) = delta z + unwrapped arg(a + b e^{2 i l_next z}); since
    b > |a| the argument winds exactly once per period and theta' > 0.
    """
    if l_prev < l_next:
        s_prev, s_next = s_next, s_prev
        l_prev, l_next = l_next, l_prev
    a = float(s_next - s_prev)
    b = float(s_next + s_prev)
    delta = l_prev - l_next
    two_ln = 2.0 * l_next

    def theta(z: float) -> float:
        u = two_ln * z
        w = math.remainder(u, 2.0 * PI)
        g = math.atan2(b * math.sin(w), a + b * math.cos(w)) - w
        return delta * z + u + g

    return theta, delta + two_ln


def bridge_count(s_prev: int, s_next: int, l_prev: float, l_next: float,
                 lam_max: float) -> int:
    """Number of bridge eigenvalues in (0, lam_max]."""
    if lam_max <= 0:
        return 0
    theta, _ = _bridge_phase(s_prev, s_next, l_prev, l_next)
    return int(math.floor(theta(math.sqrt(lam_max)) / PI + 1e-12))


def bridge_eigenvalues(s_prev: int, s_next: int, l_prev: float, l_next: float,
                       lam_max: float) -> list[float]:
    """All bridge eigenvalues in (0, lam_max], lowest first.

    Equal lengths and equal sphere counts use the exact closed-form lattices
    pi^2 k^2/(2 ell)^2 and pi^2 k^2/(l_prev + l_next)^2; otherwise the k-th
    zero solves theta(z) = k pi on the monotone phase by bisection to
    relative tolerance 1e-13 in z.  The lowest zero is verified against the
    certified window [ (pi/(2 l*))^2, (pi/l*)^2 ], l* = max length, and when
    the sign pattern grants it, against the sharper bound
    pi^2/(l_prev + l_next)^2.
    """
    if lam_max <= 0:
        raise ValueError("lam_max must be positive")
    for s in (s_prev, s_next):
        if s < 1:
            raise ValueError("sphere counts must be >= 1")
    if min(l_prev, l_next) <= 0:
        raise ValueError("lengths must be positive")

    z_max = math.sqrt(lam_max)
    if l_prev == l_next:
        step = PI / (2.0 * l_prev)
        roots = [k * step for k in range(1, int(z_max / step + 1e-12) + 1)]
    elif s_prev == s_next:
        step = PI / (l_prev + l_next)
        roots = [k * step for k in range(1, int(z_max / step + 1e-12) + 1)]
    else:
        theta, rate = _bridge_phase(s_prev, s_next, l_prev, l_next)
        count = int(math.floor(theta(z_max) / PI + 1e-12))
        roots = []
        for k in range(1, count + 1):
            lo = max((k * PI - PI / 2) / rate, 0.0)
            hi = (k * PI + PI / 2) / rate
            target = k * PI
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if theta(mid) < target:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-13 * hi:
                    break
            roots.append(0.5 * (lo + hi))

    _check_bridge_bounds(s_prev, s_next, l_prev, l_next, roots, z_max)
    return [z * z for z in roots]


def _check_bridge_bounds(s_prev, s_next, l_prev, l_next, roots, z_max):
    slack = 1e-9
    total = l_prev + l_next
    expected = total * z_max / PI
    if abs(len(roots) - expected) > 2.0 + slack:
        raise InternalConsistencyError(
            f"bridge zero count {len(roots)} strays from ({total:.3g}/pi)*z "
            f"= {expected:.3f} by more than 2")
    if not roots:
        return
    lam1 = roots[0] ** 2
    lstar = max(l_prev, l_next)
    lo, hi = (PI / (2 * lstar)) ** 2, (PI / lstar) ** 2
    if lam1 < lo * (1 - slack) or lam1 > hi * (1 + slack):
        raise InternalConsistencyError(
            f"lowest bridge eigenvalue {lam1:.12g} outside certified window "
            f"[{lo:.12g}, {hi:.12g}]")
    if (s_next - s_prev) * (l_next - l_prev) > 0:
        sharper = (PI / total) ** 2
        if lam1 > sharper * (1 + slack):
            raise InternalConsistencyError(
                f"lowest bridge eigenvalue {lam1:.12g} violates the sharper "
                f"bound {sharper:.12g}")


def _bridge_lowest(s_prev, s_next, l_prev, l_next) -> float:
    """Smallest bridge eigenvalue (first zero of the phase)."""
    lstar = max(l_prev, l_next)
    return bridge_eigenvalues(s_prev, s_next, l_prev, l_next,
                              (PI / lstar) ** 2 * (1 + 1e-9))[0]


# ---------------------------------------------------------------------------
# radial block: transfer matrices


def interval_propagator(mu: float, h: float, lam: float) -> np.ndarray:
    """Propagator of the state (f, mu f') across one constant-weight interval."""
    if lam > 0:
        w = math.sqrt(lam)
        c, s = math.cos(w * h), math.sin(w * h)
        return np.array([[c, s / (w * mu)], [-w * mu * s, c]])
    if lam == 0:
        return np.array([[1.0, h / mu], [0.0, 1.0]])
    w = math.sqrt(-lam)
    c, s = math.cosh(w * h), math.sinh(w * h)
    return np.array([[c, s / (w * mu)], [w * mu * s, c]])


def sym_transfer(profile: MetricProfile, lam: float,
                 from_index: int = 0, to_index: int | None = None) -> np.ndarray:
    """Transfer matrix of the radial block across intervals from..to inclusive.

    Maps the state (f, mu f') at t_{from} to the state at t_{to+1}; the state
    is continuous across breakpoints because the interface condition
    s_{n-1} f'(t_n-) = s_{n+1} f'(t_n+) is exactly continuity of mu f'.
    """
    if to_index is None:
        to_index = profile.N
    if not 0 <= from_index <= to_index <= profile.N:
        raise IndexError("interval range out of bounds")
    M = np.eye(2)
    for n in range(from_index, to_index + 1):
        M = interval_propagator(profile.mu[n], profile.interval_length(n), lam) @ M
    return M


def sym_transfer_scaled(profile: MetricProfile, lam: float,
                        from_index: int = 0, to_index: int | None = None
                        ) -> tuple[np.ndarray, float]:
    """Transfer matrix as (normalized matrix, log scale).

    The true matrix is exp(logscale) * matrix; per-step renormalization keeps
    entries of order one so the determinant remains meaningful for strongly
    contrasting weights.
    """
    if to_index is None:
        to_index = profile.N
    if not 0 <= from_index <= to_index <= profile.N:
        raise IndexError("interval range out of bounds")
    M = np.eye(2)
    logscale = 0.0
    for n in range(from_index, to_index + 1):
        M = interval_propagator(profile.mu[n], profile.interval_length(n), lam) @ M
        scale = np.abs(M).max()
        if scale > 0:
            M = M / scale
            logscale += math.log(scale)
    return M, logscale


def transfer_determinant(profile: MetricProfile, lam: float,
                         from_index: int = 0, to_index: int | None = None
                         ) -> float:
    """Determinant of the transfer product, evaluated factor by factor.

    The collapsed 2x2 float matrix is exponentially ill-conditioned for
    strongly contrasting weights, which makes its entrywise determinant
    meaningless; the determinant of the product equals the product of the
    stored factors' determinants, each of which is cos^2 + sin^2 up to
    rounding, so this evaluation stays accurate at any scale (lam >= 0).
    """
    if to_index is None:
        to_index = profile.N
    if not 0 <= from_index <= to_index <= profile.N:
        raise IndexError("interval range out of bounds")
    if lam < 0:
        raise ValueError("factored determinant is provided for lam >= 0")
    det = 1.0
    for n in range(from_index, to_index + 1):
        P = interval_propagator(profile.mu[n], profile.interval_length(n), lam)
        det *= P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]
    return det


def _boundary_state(profile: MetricProfile, lam: float) -> tuple[float, float]:
    """Normalized state (f, mu f') at t_{N+1} for the Neumann-at-0 solution."""
    u, v = 1.0, 0.0
    for n in range(profile.N + 1):
        P = interval_propagator(profile.mu[n], profile.interval_length(n), lam)
        u, v = P[0, 0] * u + P[0, 1] * v, P[1, 0] * u + P[1, 1] * v
        scale = max(abs(u), abs(v))
        if scale > 0:
            u, v = u / scale, v / scale
    return u, v


# ---------------------------------------------------------------------------
# radial block: Pruefer oscillation counting


def sym_count(profile: MetricProfile, lam: float,
              right_bc: BoundaryCondition) -> int:
    """Number of radial-block eigenvalues in [0, lam).

    Neumann at the root; `right_bc` at t_{N+1}.  The modified Pruefer angle
    (with respect to the scaled state (f, mu f'/(z mu))) advances exactly
    z * ell_n inside each interval and is rebased within its pi-window at
    each breakpoint, so the count is exact, never a root search.  For Robin
    parameters in (pi/2, pi) a single negative eigenvalue may exist; it is
    outside the nonnegative window counted here.
    """
    if lam <= 0:
        return 0
    z = math.sqrt(lam)
    psi = PI / 2  # Neumann start: f = 1, mu f' = 0
    for n in range(profile.N + 1):
        psi += z * profile.interval_length(n)
        if n < profile.N:
            k = math.floor(psi / PI)
            frac = psi - k * PI
            ratio = profile.mu[n] / profile.mu[n + 1]
            frac2 = math.atan2(math.sin(frac), math.cos(frac) * ratio)
            if frac2 < 0:
                frac2 += PI
            psi = k * PI + frac2
    # convert the scaled angle to the true Pruefer angle of (f, mu f')
    k = math.floor(psi / PI)
    frac = psi - k * PI
    frac_true = math.atan2(math.sin(frac), math.cos(frac) * z * profile.mu[-1])
    if frac_true < 0:
        frac_true += PI
    phi = k * PI + frac_true

    # eigenvalue lattice: phi(T; lam') = j*pi - theta, crossings in (pi/2, phi)
    if right_bc.kind is BCKind.DIRICHLET:
        count = max(0, math.ceil(phi / PI) - 1)
    else:
        j_min = 2 if right_bc.kind is BCKind.NEUMANN else \
            math.floor(0.5 + right_bc.theta / PI) + 1
        j_max = math.ceil((phi + right_bc.theta) / PI) - 1
        count = max(0, j_max - j_min + 1)
    if right_bc.kind is BCKind.NEUMANN:
        count += 1  # lam = 0 with the constant eigenfunction
    return count


def _positive_count(profile, lam, right_bc) -> int:
    c = sym_count(profile, lam, right_bc)
    if right_bc.kind is BCKind.NEUMANN and lam > 0:
        c -= 1
    return c


def sym_eigenvalues(profile: MetricProfile, right_bc: BoundaryCondition,
                    k_max: int) -> list[float]:
    """Lowest k_max eigenvalues of the truncated radial block.

    Each positive eigenvalue is isolated by bisection on the oscillation
    count to relative width 1e-10 and then polished by bisection on the
    boundary functional cos(theta) f + sin(theta) (mu f') evaluated through
    the (rescaled) transfer matrix.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    out: list[float] = []
    if right_bc.kind is BCKind.NEUMANN:
        out.append(0.0)
    need = k_max - len(out)
    if need == 0:
        return out

    T = profile.total_length
    hi = (PI * (need + 2) / T) ** 2
    while _positive_count(profile, hi, right_bc) < need:
        hi *= 4.0

    theta = right_bc.theta

    def boundary_fn(lam: float) -> float:
        u, v = _boundary_state(profile, lam)
        return math.cos(theta) * u + math.sin(theta) * v

    prev = 0.0
    for j in range(1, need + 1):
        a, b = prev, hi
        while b - a > 1e-10 * b:
            mid = 0.5 * (a + b)
            if _positive_count(profile, mid, right_bc) >= j:
                b = mid
            else:
                a = mid
        fa, fb = boundary_fn(a), boundary_fn(b)
        if fa * fb < 0:
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = boundary_fn(mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if fa * fm < 0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
                if b - a <= 1e-14 * b:
                    break
        lam_j = 0.5 * (a + b)
        out.append(lam_j)
        prev = lam_j
    return out


# ---------------------------------------------------------------------------
# assembled spectra


@dataclass(frozen=True)
class SpectralBlock:
    kind: str                 # "sym" | "cell" | "bridge" | "boundary_cell"
    generation: int | None
    multiplicity: int


@dataclass(frozen=True)
class SpectrumEntry:
    value: float
    multiplicity: int
    block: str
    generation: int | None


@dataclass(frozen=True)
class Spectrum:
    entries: tuple[SpectrumEntry, ...]  # sorted ascending by value
    blocks: tuple[SpectralBlock, ...]
    lam_max: float
    right_bc: BoundaryCondition

    def values_with_multiplicity(self) -> list[float]:
        out: list[float] = []
        for e in self.entries:
            out.extend([e.value] * e.multiplicity)
        return out


def decomposed_spectrum(profile: MetricProfile, right_bc: BoundaryCondition,
                        lam_max: float) -> Spectrum:
    """Merge all block eigenvalues up to lam_max with their multiplicities.

    Dirichlet and Neumann truncations describe the cut graph exactly
    (the reference solver reproduces them eigenvalue by eigenvalue); the
    boundary-cell family on the last interval accounts for the severed
    sphere with multiplicity s_{N+1} - 1.  A genuine Robin parameter is a
    proxy for the boundary condition at L of a finite-volume antitree and
    carries no boundary cell.
    """
    if lam_max <= 0:
        raise ValueError("lam_max must be positive")
    N = profile.N
    s = profile.s
    for n in range(N + 1):
        # generation dimension bookkeeping, exact in integers
        total = 1 + (s[n] - 1) + (s[n + 1] - 1) + (s[n] - 1) * (s[n + 1] - 1)
        if total != s[n] * s[n + 1]:
            raise InternalConsistencyError("generation dimension mismatch")

    entries: list[SpectrumEntry] = []
    blocks: list[SpectralBlock] = [SpectralBlock("sym", None, 1)]

    n_sym = sym_count(profile, lam_max * (1 + 1e-12), right_bc)
    if n_sym > 0:
        for lam in sym_eigenvalues(profile, right_bc, n_sym):
            entries.append(SpectrumEntry(lam, 1, "sym", None))

    z_max = math.sqrt(lam_max)
    for n in range(1, N + 1):
        mult = (s[n] - 1) * (s[n + 1] - 1)
        if mult > 0:
            blocks.append(SpectralBlock("cell", n, mult))
            ell = profile.interval_length(n)
            k_top = int(math.floor(z_max * ell / PI * (1 + 1e-13)))
            for lam in cell_eigenvalues(ell, k_top) if k_top >= 1 else []:
                entries.append(SpectrumEntry(lam, mult, "cell", n))

    for n in range(1, N + 1):
        mult = s[n] - 1
        if mult > 0:
            blocks.append(SpectralBlock("bridge", n, mult))
            lp, ln = profile.interval_length(n - 1), profile.interval_length(n)
            if (PI / (2 * max(lp, ln))) ** 2 > lam_max:
                continue  # certified empty below lam_max
            for lam in bridge_eigenvalues(s[n - 1], s[n + 1], lp, ln, lam_max):
                entries.append(SpectrumEntry(lam, mult, "bridge", n))

    if right_bc.kind in (BCKind.DIRICHLET, BCKind.NEUMANN):
        mult = s[N + 1] - 1
        if mult > 0:
            blocks.append(SpectralBlock("boundary_cell", N, mult))
            ell = profile.interval_length(N)
            if right_bc.kind is BCKind.DIRICHLET:
                k_top = int(math.floor(z_max * ell / PI * (1 + 1e-13)))
                vals = cell_eigenvalues(ell, k_top) if k_top >= 1 else []
            else:
                vals = []
                k = 1
                while (PI * (k - 0.5) / ell) ** 2 <= lam_max:
                    vals.append((PI * (k - 0.5) / ell) ** 2)
                    k += 1
            for lam in vals:
                entries.append(SpectrumEntry(lam, mult, "boundary_cell", N))

    entries.sort(key=lambda e: e.value)
    return Spectrum(tuple(entries), tuple(blocks), lam_max, right_bc)


def counting_function(spectrum: Spectrum, lam: float) -> int:
    """N(lam): number of eigenvalues <= lam, counted with multiplicity."""
    if lam > spectrum.lam_max:
        raise ValueError(
            f"spectrum assembled only up to {spectrum.lam_max}; asked for {lam}")
    return sum(e.multiplicity for e in spectrum.entries if e.value <= lam)


def total_volume(spec: AntitreeSpec, tol: float = 1e-9) -> float:
    """Total volume sum mu_n ell_n when it converges; certified to tol.

    For polynomially growing spheres with power-law lengths the value is the
    exact binomial-zeta expression; otherwise partial sums are extended until
    the certified tail bracket is narrower than tol.
    """
    sph, lng = spec.spheres, spec.lengths
    if isinstance(sph, PolynomialSpheres) and isinstance(lng, PowerLength):
        q, sg = sph.q, lng.s
        if sg - 2 * q <= 1.0:
            raise ValueError("total volume diverges for this parameter range")
        return math.fsum(math.comb(q, k) * zeta(sg - 2 * q + k)
                         for k in range(q + 1))
    n = 64
    while n <= 2 ** 22:
        br = spec.vol_tail_bracket(n)
        if br is None:
            raise ValueError("no certified tail for the total volume")
        if br[0] == math.inf:
            raise ValueError("total volume diverges")
        if br[1] - br[0] <= tol:
            partial = math.fsum(spec.weight(k) * spec.length(k) for k in range(n))
            return partial + 0.5 * (br[0] + br[1])
        n *= 2
    raise ValueError(f"could not certify the volume to {tol}")


def weyl_ratio(spectrum: Spectrum, lam: float, spec: AntitreeSpec
               ) -> tuple[float, float]:
    """(N(lam)/sqrt(lam), vol/pi).  Raises when the volume diverges."""
    n = counting_function(spectrum, lam)
    target = total_volume(spec) / PI
    return n / math.sqrt(lam), target


def lambda0_estimate(spec: AntitreeSpec, N_list: list[int]) -> list[float]:
    """Upper bounds for the bottom of the spectrum from Dirichlet truncations.

    For each depth N the smallest eigenvalue over all blocks of the
    Dirichlet-truncated decomposition; the sequence is nonincreasing in N by
    form-domain inclusion and every value dominates the true bottom.
    """
    out = []
    bc = BoundaryCondition.dirichlet()
    for N in N_list:
        profile = build_profile(spec, N)
        best = sym_eigenvalues(profile, bc, 1)[0]
        s = profile.s
        for n in range(1, N + 1):
            if (s[n] - 1) * (s[n + 1] - 1) > 0:
                best = min(best, (PI / profile.interval_length(n)) ** 2)
            if s[n] - 1 > 0:
                lp, ln = profile.interval_length(n - 1), profile.interval_length(n)
                if (PI / (2 * max(lp, ln))) ** 2 < best:
                    best = min(best, _bridge_lowest(s[n - 1], s[n + 1], lp, ln))
        if s[N + 1] - 1 > 0:
            best = min(best, (PI / profile.interval_length(N)) ** 2)
        out.append(best)
    return out
