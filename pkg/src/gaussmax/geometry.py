"""Tetrahedra of unit vectors: the geometric side of the expected-maximum
problem.  Dihedral angles, perpendicular feet, the width-transfer function
f(x) = sqrt(1-x^2)/arccos(x) and its inverse, the quadratic form H built
from it, the stationarity relation satisfied by maximizers, and mean width
by spherical quadrature.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .closedform import _safe_arccos_arg
from .corrmat import (
    PAIR_INDEX,
    PAIRS,
    CorrelationMatrix4,
    DomainTag,
    classify,
    derive,
    rank,
)

# Facets in the fixed order F1..F4 (0-based vertex triples) and the facet
# pairs indexing the six dihedral angles.
FACETS: tuple[tuple[int, int, int], ...] = ((0, 1, 2), (0, 2, 3), (0, 1, 3), (1, 2, 3))
FACET_PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# Facet pair (i, j) <-> the unique vertex pair shared by both facets.  The
# dihedral angle between facets i and j sits along that shared edge.
EDGE_OF_FACET_PAIR: tuple[int, ...] = tuple(
    PAIR_INDEX[tuple(sorted(set(FACETS[i]) & set(FACETS[j])))]
    for i, j in FACET_PAIRS
)

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Tetrahedron:
    """Four unit vectors in R^3 (possibly degenerate)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.shape != (4, 3):
            raise ValueError("vertices must be a 4x3 array")
        norms = np.linalg.norm(v, axis=1)
        if np.max(np.abs(norms - 1.0)) > _UNIT_TOL:
            raise ValueError("vertices must be unit vectors")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @classmethod
    def regular(cls) -> "Tetrahedron":
        v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
        return cls(v / np.sqrt(3.0))

    @classmethod
    def from_json_obj(cls, obj) -> "Tetrahedron":
        if not isinstance(obj, dict) or "vertices" not in obj:
            raise ValueError("expected a JSON object with a 'vertices' field")
        return cls(np.asarray(obj["vertices"], dtype=float))

    def to_json_obj(self) -> dict:
        return {"vertices": [list(row) for row in self.vertices]}


def load_tetrahedron(path: str) -> Tetrahedron:
    with open(path) as fh:
        return Tetrahedron.from_json_obj(json.load(fh))


@dataclass(frozen=True)
class DihedralSet:
    """Outer dihedral angles alpha_ij, facet-pair order (12,13,14,23,24,34)."""

    alpha: np.ndarray


@dataclass(frozen=True)
class FootData:
    """Perpendicular feet from the circumcenter: lengths L_i to the facet
    planes, volumes V_i of the cones over the facets, the mean gamma of the
    six stationarity products L_i L_j alpha_ij / sin(alpha_ij) with its
    relative spread, and the normalized lengths u_i = L_i / sqrt(gamma)."""

    lengths: np.ndarray
    volumes: np.ndarray
    gamma: float
    u: np.ndarray
    residual: float


def embed(m: CorrelationMatrix4) -> Tetrahedron:
    """Unit vectors in R^3 whose Gram matrix is m (rank <= 3 required).

    Convention: v1 = (0,0,1); v2 in the xz-plane with x >= 0.
    """
    if classify(m).tag is DomainTag.INVALID:
        raise ValueError("not a correlation matrix")
    mat = m.matrix()
    w, vec = np.linalg.eigh(mat)
    if rank(m) > 3:
        raise ValueError("matrix has rank 4: no 3-D unit-vector realization")
    rows = vec[:, 1:] * np.sqrt(np.clip(w[1:], 0.0, None))

    e3 = rows[0] / np.linalg.norm(rows[0])
    e1 = None
    for cand in rows[1:]:
        p = cand - (cand @ e3) * e3
        if np.linalg.norm(p) > 1e-9:
            e1 = p / np.linalg.norm(p)
            break
    if e1 is None:  # rank 1: all vertices on one axis
        e1 = np.zeros(3)
        e1[int(np.argmin(np.abs(e3)))] = 1.0
        e1 -= (e1 @ e3) * e3
        e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    frame = np.column_stack([e1, e2, e3])
    verts = rows @ frame
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    gram = verts @ verts.T
    if np.max(np.abs(gram - mat)) > 1e-10:
        raise ValueError("embedding failed to reproduce the Gram matrix")
    return Tetrahedron(verts)


def corr_of(t: Tetrahedron) -> CorrelationMatrix4:
    """Gram matrix of the vertices as a correlation matrix."""
    g = t.vertices @ t.vertices.T
    return CorrelationMatrix4(tuple(float(np.clip(g[i, j], -1.0, 1.0)) for i, j in PAIRS))


def dihedrals(m: CorrelationMatrix4) -> DihedralSet:
    """Outer dihedral angles from the derived matrix quantities alone.

    cos(alpha) along edge (k,l) is the arccos argument of the closed form;
    the angle is stored under the facet pair sharing that edge.
    """
    cls = classify(m)
    if cls.tag in (DomainTag.INVALID, DomainTag.DEGENERATE_UNIT_PAIR):
        raise ValueError("dihedrals require all correlations != 1")
    d = derive(m)
    rad_sq = d.lambda_prime * d.a_tilde ** 2 + d.lambda_tilde ** 2
    cosines = _safe_arccos_arg(d.lambda_tilde, rad_sq)
    alpha = np.array([np.arccos(cosines[EDGE_OF_FACET_PAIR[t]]) for t in range(6)])
    alpha.flags.writeable = False
    return DihedralSet(alpha)


def _outward_normals(t: Tetrahedron) -> np.ndarray:
    """Unit facet normals pointing away from the opposite vertex."""
    v = t.vertices
    normals = np.empty((4, 3))
    for i, facet in enumerate(FACETS):
        p, q, r = (v[j] for j in facet)
        opp = v[list(set(range(4)) - set(facet))[0]]
        n = np.cross(q - p, r - p)
        norm = np.linalg.norm(n)
        if norm < 1e-14:
            raise ValueError(f"facet {i + 1} is degenerate")
        n /= norm
        if n @ (opp - p) > 0:
            n = -n
        normals[i] = n
    return normals


def dihedrals_of(t: Tetrahedron) -> DihedralSet:
    """Outer dihedral angles via facet normals (angles between outward
    normals of adjacent facets); independent cross-check of dihedrals()."""
    normals = _outward_normals(t)
    alpha = np.array([
        np.arccos(np.clip(normals[i] @ normals[j], -1.0, 1.0)) for i, j in FACET_PAIRS
    ])
    alpha.flags.writeable = False
    return DihedralSet(alpha)


def facet_areas(t: Tetrahedron) -> np.ndarray:
    v = t.vertices
    return np.array([
        0.5 * np.linalg.norm(np.cross(v[b] - v[a], v[c] - v[a]))
        for a, b, c in FACETS
    ])


def origin_inside(t: Tetrahedron, tol: float = 1e-10) -> bool:
    """Strict interiority of the origin via signed barycentric coordinates."""
    a = np.vstack([t.vertices.T, np.ones(4)])
    try:
        w = np.linalg.solve(a, np.array([0.0, 0.0, 0.0, 1.0]))
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(w > tol))


def foot_data(t: Tetrahedron) -> FootData:
    """Feet of the perpendiculars from the origin to the facet planes."""
    v = t.vertices
    normals = _outward_normals(t)
    dist = np.array([normals[i] @ v[FACETS[i][0]] for i in range(4)])
    if np.min(np.abs(dist)) < 1e-12:
        raise ValueError("origin lies on a facet plane")
    lengths = np.abs(dist)
    volumes = facet_areas(t) * lengths / 3.0
    alpha = dihedrals_of(t).alpha
    if np.any(alpha > np.pi - 1e-9):
        raise ValueError("flat fold: an outer dihedral angle equals pi")
    # alpha/sin(alpha) -> 1 as alpha -> 0
    ratio = np.where(alpha > 1e-9, alpha / np.sin(np.clip(alpha, 1e-300, None)), 1.0)
    prods = np.array([
        lengths[i] * lengths[j] * ratio[idx]
        for idx, (i, j) in enumerate(FACET_PAIRS)
    ])
    gamma = float(np.mean(prods))
    residual = float(np.max(np.abs(prods - gamma)) / gamma)
    return FootData(lengths=lengths, volumes=volumes, gamma=gamma,
                    u=lengths / np.sqrt(gamma), residual=residual)


def stationarity_residual(m: CorrelationMatrix4) -> float:
    """Relative spread of the six products L_i L_j alpha_ij / sin(alpha_ij);
    zero exactly at stationary configurations."""
    t = embed(m)
    if not origin_inside(t):
        raise ValueError("origin is not strictly inside the tetrahedron")
    return foot_data(t).residual


# ---------------------------------------------------------------------------
# the width-transfer function f and its inverse


def _f_width_arr(x: np.ndarray) -> np.ndarray:
    t = 1.0 - x
    near1 = t < 1e-6
    xs = np.where(near1, 0.0, x)
    reg = np.sqrt(np.clip(1.0 - xs * xs, 0.0, None)) / np.arccos(np.clip(xs, -1.0, 1.0))
    # one-sided series at x = 1 where arccos loses precision
    return np.where(near1, 1.0 - t / 3.0 - t * t / 45.0, reg)


def _sinc_inv(y: np.ndarray) -> np.ndarray:
    """t in [0, pi] with sin(t)/t = y, elementwise safeguarded Newton."""
    t = np.where(y > 0.5, np.sqrt(6.0 * (1.0 - y)), np.pi * (1.0 - y) / (1.0 + y))
    t = np.clip(t, 0.0, np.pi)
    lo = np.zeros_like(t)
    hi = np.full_like(t, np.pi)
    done = np.zeros(t.shape, dtype=bool)
    for _ in range(80):
        st, ct = np.sin(t), np.cos(t)
        tt = np.where(t < 1e-8, 1.0, t)
        g = np.where(t < 1e-8, 1.0 - t * t / 6.0, st / tt) - y
        above = g > 0  # sinc decreasing: root lies to the right
        lo = np.where(above & ~done, t, lo)
        hi = np.where(above | done, hi, t)
        gp = np.where(t < 1e-8, -t / 3.0, (ct * tt - st) / (tt * tt))
        tn = t - g / np.where(np.abs(gp) < 1e-300, -1e-300, gp)
        bad = ~np.isfinite(tn) | (tn < lo) | (tn > hi)
        tn = np.where(bad & ~done, 0.5 * (lo + hi), tn)
        tn = np.where(done, t, tn)
        done |= np.abs(tn - t) < 1e-13
        t = tn
        if done.all():
            break
    return t


def _f_inv_arr(y: np.ndarray) -> np.ndarray:
    return np.cos(_sinc_inv(y))


def f_width(x):
    """sqrt(1-x^2)/arccos(x) on [-1,1], extended by f(1) = 1; increasing."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -1.0) or np.any(arr > 1.0):
        raise ValueError("argument must lie in [-1, 1]")
    out = _f_width_arr(np.atleast_1d(arr))
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def f_width_inv(y):
    """Inverse of f_width on [0, 1]."""
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("argument must lie in [0, 1]")
    out = _f_inv_arr(np.atleast_1d(arr))
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def _gram_of_triple(x: float, y: float, z: float) -> np.ndarray:
    return np.array([
        [1.0, f_width_inv(x * y), f_width_inv(x * z)],
        [f_width_inv(x * y), 1.0, f_width_inv(y * z)],
        [f_width_inv(x * z), f_width_inv(y * z), 1.0],
    ])


def h_func(x: float, y: float, z: float) -> float:
    """Quadratic form (x,y,z) Gamma^-1 (x,y,z)^T with Gamma_ij the f-inverse
    of the pairwise products; defined where det(Gamma) > 0."""
    for name, v in (("x", x), ("y", y), ("z", z)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    for name, p in (("xy", x * y), ("xz", x * z), ("yz", y * z)):
        if not p < 1:
            raise ValueError(f"product {name} must be < 1")
    g = _gram_of_triple(x, y, z)
    if np.linalg.det(g) <= 0:
        raise ValueError("det(Gamma) <= 0: triple outside the admissible set")
    v = np.array([x, y, z])
    return float(v @ np.linalg.solve(g, v))


def h_func_expanded(x, y, z, xy_entry=None):
    """Vectorized H through the expanded rational form; z may be an array.

    Returns (H, det) so scans can keep only det > 0 points.  ``xy_entry``
    lets callers reuse f_width_inv(x*y) across a z-sweep.
    """
    s = f_width_inv(x * y) if xy_entry is None else xy_entry
    e = _f_inv_arr(np.asarray(x * z, dtype=float))
    xi = _f_inv_arr(np.asarray(y * z, dtype=float))
    det = 1.0 - s * s - e * e - xi * xi + 2.0 * s * e * xi
    num = (
        x * x * (1 - xi * xi) + y * y * (1 - e * e) + z * z * (1 - s * s)
        + 2 * x * y * (e * xi - s) + 2 * x * z * (s * xi - e) + 2 * y * z * (s * e - xi)
    )
    return num / det, det


def gamma_det(x, y, z):
    """det of the 3x3 matrix with unit diagonal and f_width_inv of the
    pairwise products off the diagonal; vectorized in z."""
    s = f_width_inv(x * y)
    e = _f_inv_arr(np.asarray(x * z, dtype=float))
    xi = _f_inv_arr(np.asarray(y * z, dtype=float))
    return 1.0 - s * s - e * e - xi * xi + 2.0 * s * e * xi


# ---------------------------------------------------------------------------
# mean width


def _azimuth_mean_of_max(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Average over phi of max_i(a_i cos(phi) + b_i sin(phi) + c_i).

    The max of sinusoids is integrated exactly arc by arc; breakpoints are
    the crossings of each pair of sinusoids.
    """
    cuts = [0.0]
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            da, db, dc = a[i] - a[j], b[i] - b[j], c[j] - c[i]
            r = np.hypot(da, db)
            if r < 1e-15:
                continue
            if abs(dc) <= r:
                base = np.arctan2(db, da)
                half = np.arccos(np.clip(dc / r, -1.0, 1.0))
                cuts.append((base + half) % (2 * np.pi))
                cuts.append((base - half) % (2 * np.pi))
    cuts = np.unique(np.asarray(cuts))
    cuts = np.append(cuts, cuts[0] + 2 * np.pi)
    total = 0.0
    for k in range(len(cuts) - 1):
        lo, hi = cuts[k], cuts[k + 1]
        if hi - lo < 1e-14:
            continue
        mid = 0.5 * (lo + hi)
        i = int(np.argmax(a * np.cos(mid) + b * np.sin(mid) + c))
        total += (a[i] * (np.sin(hi) - np.sin(lo))
                  - b[i] * (np.cos(hi) - np.cos(lo))
                  + c[i] * (hi - lo))
    return total / (2 * np.pi)


def mean_width(t: Tetrahedron, quad_order: int = 50) -> float:
    """Twice the spherical average of the support function max_i <u, v_i>.

    Gauss-Legendre in the polar cosine (quad_order nodes); along each
    latitude circle the piecewise-sinusoid support function is integrated
    exactly.
    """
    if quad_order < 1:
        raise ValueError("quad_order must be >= 1")
    nodes, weights = leggauss(quad_order)
    v = t.vertices
    sin_t = np.sqrt(1.0 - nodes ** 2)
    acc = 0.0
    for i in range(quad_order):
        acc += weights[i] / 2.0 * _azimuth_mean_of_max(
            sin_t[i] * v[:, 0], sin_t[i] * v[:, 1], nodes[i] * v[:, 2]
        )
    return 2.0 * acc


# Radial factor linking the spherical average to the Gaussian expectation:
# E||G_3|| for a standard 3-D Gaussian.
GAUSSIAN_RADIAL_FACTOR = float(2.0 * np.sqrt(2.0 / np.pi))
