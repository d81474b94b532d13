"""Brute-force reference solver on the full truncated metric antitree.

No symmetry is used here: the truncated graph is meshed edge by edge with
piecewise-linear elements and a consistent mass matrix, vertex degrees of
freedom are shared (continuity), and the Kirchhoff condition is natural for
the edgewise Dirichlet form.  The generalized eigenproblem is solved densely
at desk scale.  Its only job is to validate, eigenvalue by eigenvalue and
multiplicity by multiplicity, the block decomposition produced in
:mod:`antitree.spectra`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import MetricProfile
from .spectra import BoundaryCondition, decomposed_spectrum

MAX_DENSE_DOF = 5000


@dataclass(frozen=True)
class Edge:
    tail: int          # vertex id in sphere n
    head: int          # vertex id in sphere n+1
    generation: int
    length: float
    elements: int


@dataclass(frozen=True)
class MetricGraphMesh:
    profile: MetricProfile
    h: float
    boundary: str                      # "dirichlet" | "neumann"
    sphere_vertices: tuple[tuple[int, ...], ...]   # vertex ids per sphere 0..N+1
    edges: tuple[Edge, ...]
    ndof: int
    keep: tuple[int, ...]              # dofs kept after boundary elimination

    def edge_list_text(self) -> str:
        """Plain-text edge list (tail head generation length elements)."""
        lines = [f"{e.tail} {e.head} {e.generation} {e.length:.15g} {e.elements}"
                 for e in self.edges]
        return "\n".join(lines) + "\n"


def build_mesh(profile: MetricProfile, h: float, boundary: str = "dirichlet",
               sphere_orderings: dict[int, list[int]] | None = None
               ) -> MetricGraphMesh:
    """Mesh the truncated antitree: complete bipartite edge sets between
    consecutive spheres, each edge split into ceil(length/h) >= 4 elements.

    `sphere_orderings` optionally permutes the vertex labels inside chosen
    spheres; the assembled spectrum must not depend on it.
    """
    if boundary not in ("dirichlet", "neumann"):
        raise ValueError("boundary must be 'dirichlet' or 'neumann'")
    if not h > 0:
        raise ValueError("mesh size must be positive")
    N = profile.N
    s = profile.s

    next_id = 0
    spheres: list[tuple[int, ...]] = []
    for n in range(N + 2):
        ids = list(range(next_id, next_id + s[n]))
        if sphere_orderings and n in sphere_orderings:
            perm = sphere_orderings[n]
            if sorted(perm) != list(range(s[n])):
                raise ValueError(f"bad permutation for sphere {n}")
            ids = [ids[p] for p in perm]
        spheres.append(tuple(ids))
        next_id += s[n]

    edges = []
    for n in range(N + 1):
        ell = profile.interval_length(n)
        m = math.ceil(ell / h)
        if m < 4:
            raise ValueError(
                f"mesh size {h} gives only {m} elements on an edge of length "
                f"{ell}; at least 4 are required")
        for a in spheres[n]:
            for b in spheres[n + 1]:
                edges.append(Edge(a, b, n, ell, m))

    n_vertices = next_id
    ndof = n_vertices + sum(e.elements - 1 for e in edges)
    if boundary == "dirichlet":
        dropped = set(spheres[N + 1])
        keep = tuple(i for i in range(ndof) if i not in dropped)
    else:
        keep = tuple(range(ndof))
    return MetricGraphMesh(profile, h, boundary, tuple(spheres), tuple(edges),
                           ndof, keep)


def assemble_mesh(mesh: MetricGraphMesh) -> tuple[np.ndarray, np.ndarray]:
    """Stiffness sum_e int f'g' and consistent mass sum_e int fg, dense,
    with the boundary spheres eliminated for a Dirichlet truncation."""
    if mesh.ndof > MAX_DENSE_DOF:
        raise ValueError(f"{mesh.ndof} dofs exceed the dense-solver guard "
                         f"({MAX_DENSE_DOF}); coarsen the mesh")
    K = np.zeros((mesh.ndof, mesh.ndof))
    M = np.zeros((mesh.ndof, mesh.ndof))
    nxt = sum(mesh.profile.s)  # interior dofs start after the vertex dofs
    for e in mesh.edges:
        he = e.length / e.elements
        nodes = [e.tail] + list(range(nxt, nxt + e.elements - 1)) + [e.head]
        nxt += e.elements - 1
        k00 = 1.0 / he
        m00, m01 = he / 3.0, he / 6.0
        for i in range(e.elements):
            a, b = nodes[i], nodes[i + 1]
            K[a, a] += k00
            K[b, b] += k00
            K[a, b] -= k00
            K[b, a] -= k00
            M[a, a] += m00
            M[b, b] += m00
            M[a, b] += m01
            M[b, a] += m01
    idx = np.asarray(mesh.keep)
    return K[np.ix_(idx, idx)], M[np.ix_(idx, idx)]


def assemble(profile: MetricProfile, h: float, boundary: str = "dirichlet"
             ) -> tuple[np.ndarray, np.ndarray]:
    """Build the mesh and return (stiffness, mass)."""
    return assemble_mesh(build_mesh(profile, h, boundary))


def oracle_eigenvalues(mesh: MetricGraphMesh, m: int) -> np.ndarray:
    """Lowest m eigenvalues of the generalized problem K x = lam M x."""
    K, M = assemble_mesh(mesh)
    if m > K.shape[0]:
        raise ValueError(f"asked for {m} eigenvalues of a {K.shape[0]}-dof system")
    return scipy.linalg.eigh(K, M, eigvals_only=True, subset_by_index=(0, m - 1))


def fem_error_coefficient(h: float) -> float:
    """Calibrate C in the eigenvalue error model err_rel ~ C h^2 lam on the
    unit-interval Neumann-Dirichlet problem at the same resolution."""
    m = max(4, math.ceil(1.0 / h))
    he = 1.0 / m
    K = np.zeros((m + 1, m + 1))
    M = np.zeros((m + 1, m + 1))
    for i in range(m):
        K[i:i + 2, i:i + 2] += np.array([[1, -1], [-1, 1]]) / he
        M[i:i + 2, i:i + 2] += np.array([[2, 1], [1, 2]]) * he / 6.0
    K, M = K[:-1, :-1], M[:-1, :-1]  # Dirichlet at the right end
    count = min(12, m - 1)
    ev = scipy.linalg.eigh(K, M, eigvals_only=True, subset_by_index=(0, count - 1))
    c = 0.0
    for k, lam_h in enumerate(ev, start=1):
        lam = (math.pi * (k - 0.5)) ** 2
        c = max(c, abs(lam_h - lam) / lam / (h * h * lam))
    return 3.0 * c  # safety factor over the calibration instance


@dataclass(frozen=True)
class MatchRow:
    index: int
    oracle: float
    decomposed: float
    block: str
    generation: int | None
    rel_err: float
    allowed: float
    ok: bool


@dataclass(frozen=True)
class ClusterRow:
    value: float
    size: int
    oracle_spread: float
    ok: bool


@dataclass(frozen=True)
class MatchReport:
    passed: bool
    rows: tuple[MatchRow, ...]
    clusters: tuple[ClusterRow, ...]
    message: str


def verify_decomposition(profile: MetricProfile, h: float, m: int,
                         tol: float = 1e-3) -> MatchReport:
    """Compare the lowest m reference eigenvalues with the block assembly.

    Both sides use the Dirichlet truncation.  Pairing is in sorted order;
    each pair must agree within tol + C h^2 lam (C calibrated on a single
    interval), and the multiplicity clusters of the block assembly must be
    reproduced by the reference values: tight inside, separated outside.
    """
    mesh = build_mesh(profile, h, "dirichlet")
    oracle = oracle_eigenvalues(mesh, m)
    lam_max = float(oracle[-1]) * 1.5 + 1.0
    spectrum = decomposed_spectrum(profile, BoundaryCondition.dirichlet(), lam_max)

    flat: list[tuple[float, str, int | None]] = []
    for e in spectrum.entries:
        flat.extend([(e.value, e.block, e.generation)] * e.multiplicity)
    flat.sort(key=lambda r: r[0])
    if len(flat) < m:
        raise ValueError("block assembly produced fewer eigenvalues than asked;"
                         " raise lam_max")
    flat = flat[:m]

    c_fem = fem_error_coefficient(h)
    rows = []
    ok_all = True
    for i in range(m):
        lam_o = float(oracle[i])
        lam_d, block, gen = flat[i]
        allowed = tol + c_fem * h * h * max(lam_d, 1.0)
        rel = abs(lam_o - lam_d) / max(lam_d, 1e-300)
        ok = rel <= allowed
        ok_all &= ok
        rows.append(MatchRow(i, lam_o, lam_d, block, gen, rel, allowed, ok))

    # multiplicity clusters of the block assembly, truncated at m
    clusters: list[ClusterRow] = []
    i = 0
    while i < m:
        j = i
        v = flat[i][0]
        while j < m and abs(flat[j][0] - v) <= 1e-9 * max(v, 1.0):
            j += 1
        allowed = tol + c_fem * h * h * max(v, 1.0)
        spread = (oracle[j - 1] - oracle[i]) / max(v, 1e-300)
        tight = spread <= allowed
        separated = True
        if j < m:
            gap = (oracle[j] - oracle[j - 1]) / max(v, 1e-300)
            separated = gap > allowed
        if i > 0:
            gap = (oracle[i] - oracle[i - 1]) / max(v, 1e-300)
            separated &= gap > allowed
        ok = tight and separated
        ok_all &= ok
        clusters.append(ClusterRow(v, j - i, float(spread), ok))
        i = j

    msg = "PASS" if ok_all else "FAIL: " + "; ".join(
        f"eigenvalue {r.index}: oracle {r.oracle:.9g} vs blocks {r.decomposed:.9g}"
        for r in rows if not r.ok)
    if not ok_all and all(r.ok for r in rows):
        bad = [c for c in clusters if not c.ok]
        msg = "FAIL: cluster mismatch at " + ", ".join(f"{c.value:.9g}" for c in bad)
    return MatchReport(ok_all, tuple(rows), tuple(clusters), msg)
