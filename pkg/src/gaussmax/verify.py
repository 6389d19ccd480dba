"""Machine-checkable reproductions of the identities, inequalities and scans
behind the maximum theorem: the exact second-derivative balance polynomial,
monotonicity of the H function, the kernel functions K and P with their
ordering, the interval structure of the admissible set, the non-concavity
example, the nonobtuse Hessian facts, and the value bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import closedform
from .corrmat import (
    PAIR_COMPLEMENT,
    PAIR_INDEX,
    PAIRS,
    CorrelationMatrix4,
    DomainTag,
    classify,
    derive,
)
from .geometry import f_width_inv, gamma_det, h_func_expanded
from .polynomial import IntPolynomial6


class ObtuseInputError(ValueError):
    """The tetrahedron has an obtuse dihedral angle: the nonobtuse-Hessian
    hypothesis fails, so the check does not apply."""


@dataclass(frozen=True)
class ScanReport:
    name: str
    grid: str
    passed: bool
    worst_margin: float
    worst_location: tuple | None = None
    details: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "grid": self.grid,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "worst_location": list(self.worst_location) if self.worst_location else None,
            "details": self.details,
        }


# ---------------------------------------------------------------------------
# exact polynomial identity


def _p_one_minus(var: int) -> IntPolynomial6:
    return IntPolynomial6.const(1) - IntPolynomial6.variable(var)


def _p_var_diff(i: int, j: int) -> IntPolynomial6:
    return IntPolynomial6.variable(i) - IntPolynomial6.variable(j)


def quad_combination_poly(pair: int, vmap=None) -> IntPolynomial6:
    """The quadratic combination of pair ``pair`` as an exact polynomial in
    the six correlations; generated from the complement table."""
    vmap = vmap or tuple(range(6))
    k, l = PAIRS[pair]
    m, n = PAIR_COMPLEMENT[pair]

    def v(i, j):
        return IntPolynomial6.variable(vmap[PAIR_INDEX[(i, j)]])

    one = IntPolynomial6.const(1)
    return (
        (one - v(k, l) + v(k, n) - v(l, n)) * (one - v(k, l) + v(k, m) - v(l, m))
        - 2 * (one - v(k, l)) * (one - v(l, m) - v(l, n) + v(m, n))
    )


def triangle_factor_poly(tri, vmap=None) -> IntPolynomial6:
    """4(1-x)(1-y) - ((1-x)+(1-y)-(1-z))^2 on the triangle's three pairs."""
    vmap = vmap or tuple(range(6))
    i, j, k = tri

    def cp(a, b):
        return _p_one_minus(vmap[PAIR_INDEX[(a, b)]])

    lin = cp(i, j) + cp(j, k) - cp(i, k)
    return 4 * (cp(i, j) * cp(j, k)) - lin * lin


def euler_row_poly(pair: int) -> IntPolynomial6:
    """Denominator-cleared residual of the second-derivative balance row for
    the given base pair; identically zero when the closed forms are
    consistent."""
    k, l = PAIRS[pair]
    m, n = PAIR_COMPLEMENT[pair]

    def cp(a, b):
        return _p_one_minus(PAIR_INDEX[(a, b)])

    def qc(a, b):
        return quad_combination_poly(PAIR_INDEX[(a, b)])

    d1 = triangle_factor_poly((k, l, m))
    d2 = triangle_factor_poly((k, l, n))
    total = qc(k, m) * (cp(k, l) + cp(l, m) - cp(k, m)) * d2
    total = total + qc(k, n) * (cp(k, l) + cp(l, n) - cp(k, n)) * d1
    total = total - 2 * (qc(l, m) * cp(k, m) * d2)
    total = total - 2 * (qc(l, n) * cp(k, n) * d1)
    total = total - 2 * (qc(k, m) * cp(l, m) * d2)
    total = total - 2 * (qc(k, n) * cp(l, n) * d1)
    total = total - 2 * (cp(m, n) * d1 * d2)
    return total


def base_row_poly_literal() -> IntPolynomial6:
    """The base-pair residual transcribed term by term from its printed form
    (variables a..f = correlations in storage order)."""
    a, b, c, d, e, f = (IntPolynomial6.variable(i) for i in range(6))
    one = IntPolynomial6.const(1)

    def om(x):
        return one - x

    qb = om(b) * om(b) - om(b) * (om(a) + om(c) + om(d) + om(f) - 2 * om(e)) \
        + (a - d) * (c - f)
    qc_ = om(c) * om(c) - om(c) * (om(a) + om(b) + om(e) + om(f) - 2 * om(d)) \
        + (a - e) * (b - f)
    qd = om(d) * om(d) - om(d) * (om(a) + om(b) + om(e) + om(f) - 2 * om(c)) \
        + (a - b) * (e - f)
    qe = om(e) * om(e) - om(e) * (om(a) + om(c) + om(d) + om(f) - 2 * om(b)) \
        + (a - c) * (d - f)
    lin1 = one - a - d + b
    lin2 = one - a - e + c
    d1 = 4 * (om(a) * om(d)) - lin1 * lin1
    d2 = 4 * (om(a) * om(e)) - lin2 * lin2
    return (
        qb * (om(a) + om(d) - om(b)) * d2
        + qc_ * (om(a) + om(e) - om(c)) * d1
        - 2 * (qd * om(b) * d2)
        - 2 * (qe * om(c) * d1)
        - 2 * (qb * om(d) * d2)
        - 2 * (qc_ * om(e) * d1)
        - 2 * (om(f) * (d1 * d2))
    )


def polynomial_identity() -> ScanReport:
    """Exact expansion of the balance polynomial for all six base pairs."""
    literal = base_row_poly_literal()
    generated = euler_row_poly(0)
    details = {"literal_matches_generated": literal == generated}
    leftover = 0
    for pair in range(6):
        p = euler_row_poly(pair)
        details[f"row_{PAIRS[pair][0] + 1}{PAIRS[pair][1] + 1}_terms"] = p.num_terms()
        leftover += p.num_terms()
    passed = leftover == 0 and details["literal_matches_generated"]
    return ScanReport(
        name="polynomial_identity",
        grid="exact integer expansion, 6 base pairs",
        passed=passed,
        worst_margin=float(leftover),
        details=details,
    )


def base_row_value_at(vals) -> Fraction:
    """The unexpanded base-pair expression evaluated exactly at rational
    correlations (product form, no polynomial expansion)."""
    a, b, c, d, e, f = (Fraction(v) for v in vals)
    one = Fraction(1)

    def om(x):
        return one - x

    qb = om(b) ** 2 - om(b) * (om(a) + om(c) + om(d) + om(f) - 2 * om(e)) + (a - d) * (c - f)
    qc_ = om(c) ** 2 - om(c) * (om(a) + om(b) + om(e) + om(f) - 2 * om(d)) + (a - e) * (b - f)
    qd = om(d) ** 2 - om(d) * (om(a) + om(b) + om(e) + om(f) - 2 * om(c)) + (a - b) * (e - f)
    qe = om(e) ** 2 - om(e) * (om(a) + om(c) + om(d) + om(f) - 2 * om(b)) + (a - c) * (d - f)
    d1 = 4 * om(a) * om(d) - (one - a - d + b) ** 2
    d2 = 4 * om(a) * om(e) - (one - a - e + c) ** 2
    return (
        qb * (om(a) + om(d) - om(b)) * d2
        + qc_ * (om(a) + om(e) - om(c)) * d1
        - 2 * qd * om(b) * d2
        - 2 * qe * om(c) * d1
        - 2 * qb * om(d) * d2
        - 2 * qc_ * om(e) * d1
        - 2 * om(f) * d1 * d2
    )


# ---------------------------------------------------------------------------
# derivative balance, numerically


def euler_relation_check(m: CorrelationMatrix4, rel_tol: float = 1e-8) -> ScanReport:
    """Residual of sum_kl (1-corr_kl) H[pq, kl] = grad_pq / 2 for all six rows."""
    grad = closedform.gradient(m)
    hess = closedform.hessian(m)
    lp = derive(m).lambda_prime
    lhs = hess @ lp
    rhs = 0.5 * grad
    rel = np.abs(lhs - rhs) / np.abs(rhs)
    worst = int(np.argmax(rel))
    return ScanReport(
        name="euler_relation",
        grid="six rows",
        passed=bool(np.max(rel) <= rel_tol),
        worst_margin=float(rel_tol - np.max(rel)),
        worst_location=(PAIRS[worst][0] + 1, PAIRS[worst][1] + 1),
        details={"max_rel_residual": float(np.max(rel)), "rel_tol": rel_tol},
    )


# ---------------------------------------------------------------------------
# kernel functions K and P

_P_NEAR_BAND = 1e-4  # |u - theta| below this: evaluate in extended precision


def _check_ku_domain(u: float, theta: float, allow_theta: bool):
    if not 0 < theta < np.pi:
        raise ValueError("theta must lie in (0, pi)")
    if not 0 <= u < 2 * np.pi - theta:
        raise ValueError("u must lie in [0, 2*pi - theta)")
    if not allow_theta and u == theta:
        raise ValueError("u == theta is outside the domain")


def k_func(u: float, theta: float) -> float:
    """((u-t)^2 sin t + 2 u t (sin t - sin u)) / (t (cos t - cos u))."""
    _check_ku_domain(u, theta, allow_theta=False)
    num = (u - theta) ** 2 * np.sin(theta) + 2 * u * theta * (np.sin(theta) - np.sin(u))
    return float(num / (theta * (np.cos(theta) - np.cos(u))))


def p_limit(theta: float) -> float:
    """Limit of p_func(u, theta) as u -> theta."""
    if not 0 < theta < np.pi:
        raise ValueError("theta must lie in (0, pi)")
    s = np.sin(theta)
    return float((theta * theta - s * s) / (theta * s * s))


def _p_func_mp(u: float, theta: float) -> float:
    # near the removable singularity the double-precision form cancels badly
    with mp.workdps(50):
        um, tm = mp.mpf(u), mp.mpf(theta)
        num = (
            (um * um + tm * tm) * tm * (1 - mp.cos(tm) * mp.cos(um))
            - (um * um - tm * tm) * mp.sin(tm) * (mp.cos(tm) - mp.cos(um))
            - 2 * um * tm * tm * mp.sin(um) * mp.sin(tm)
        )
        den = tm ** 2 * (mp.cos(tm) - mp.cos(um)) ** 2
        return float(num / den)


def p_func(u: float, theta: float) -> float:
    """The theta-derivative of k_func; continuous across u = theta with
    value p_limit(theta)."""
    _check_ku_domain(u, theta, allow_theta=True)
    if u == theta:
        return p_limit(theta)
    if abs(u - theta) < _P_NEAR_BAND:
        return _p_func_mp(u, theta)
    return float(_p_func_arr(np.asarray(u, dtype=float), theta))


def _p_func_arr(u: np.ndarray, theta: float) -> np.ndarray:
    ct, st = np.cos(theta), np.sin(theta)
    cu, su = np.cos(u), np.sin(u)
    num = (
        (u * u + theta * theta) * theta * (1 - ct * cu)
        - (u * u - theta * theta) * st * (ct - cu)
        - 2 * u * theta * theta * su * st
    )
    return num / (theta ** 2 * (ct - cu) ** 2)


def _p_inequality_lhs(u: np.ndarray, theta: float) -> np.ndarray:
    """Left side of the positivity inequality equivalent to dP/du > 0."""
    ct, st = np.cos(theta), np.sin(theta)
    cu, su = np.cos(u), np.sin(u)
    dc = ct - cu
    b1 = 2 * u * theta * (1 - ct * cu) - 2 * u * st * dc + su * st * (u * u - 3 * theta * theta)
    b2 = (2 * u * theta ** 2 * st * (su * su + 1 - ct * cu)
          - (u * u + theta * theta) * theta * su * (st * st + 1 - ct * cu))
    return dc * dc * b1 + dc * b2


def _p_inequality_noise_scale(u: np.ndarray, theta: float) -> np.ndarray:
    """Magnitude of the largest cancelling intermediates; the double-precision
    result is only sign-reliable well above ~1e-16 times this."""
    ct, st = np.cos(theta), np.sin(theta)
    cu, su = np.cos(u), np.sin(u)
    dc = np.abs(ct - cu)
    s1 = (2 * np.abs(u) * theta * np.abs(1 - ct * cu) + 2 * np.abs(u * st) * dc
          + np.abs(su * st) * (u * u + 3 * theta * theta))
    s2 = (2 * np.abs(u) * theta ** 2 * np.abs(st) * (su * su + 1 + np.abs(ct * cu))
          + (u * u + theta * theta) * theta * np.abs(su) * (st * st + 1 + np.abs(ct * cu)))
    return dc * dc * s1 + dc * s2


def _p_inequality_lhs_mp(u: float, theta: float) -> float:
    with mp.workdps(60):
        um, tm = mp.mpf(u), mp.mpf(theta)
        dc = mp.cos(tm) - mp.cos(um)
        b1 = (2 * um * tm * (1 - mp.cos(tm) * mp.cos(um))
              - 2 * um * mp.sin(tm) * dc
              + mp.sin(um) * mp.sin(tm) * (um * um - 3 * tm * tm))
        b2 = (2 * um * tm ** 2 * mp.sin(tm) * (mp.sin(um) ** 2 + 1 - mp.cos(tm) * mp.cos(um))
              - (um * um + tm * tm) * tm * mp.sin(um) * (mp.sin(tm) ** 2 + 1 - mp.cos(tm) * mp.cos(um)))
        return float(dc * dc * b1 + dc * b2)


# ---------------------------------------------------------------------------
# scans


@dataclass(frozen=True)
class HMonotonicityGrid:
    """Grid for the H-decrease scan: n_pairs^2 points (w1, w2) in
    [w_min, w_max]^2 with w1*w2 < 1; for each admissible pair, z sweeps
    z_steps points strictly inside the admissible interval."""

    w_min: float = 0.15
    w_max: float = 1.3
    n_pairs: int = 50
    z_steps: int = 200
    det_samples: int = 2000
    edge_band: float = 1e-3  # fraction of the interval skipped at each end

    def describe(self) -> str:
        return (f"{self.n_pairs}x{self.n_pairs} pairs in "
                f"[{self.w_min},{self.w_max}]^2, {self.z_steps} z-steps")


def _interval_of_positive_det(x: float, y: float, n: int):
    """Endpoints of the det > 0 run in z over (0, 1/max(x,y)), by sign scan;
    returns (z1, z2, n_runs) with n_runs the number of contiguous runs."""
    zmax = 1.0 / max(x, y)
    z = np.linspace(zmax * 1e-6, zmax * (1 - 1e-9), n)
    det = gamma_det(x, y, z)
    pos = det > 0
    if not pos.any():
        return None, None, 0
    idx = np.flatnonzero(pos)
    runs = int(np.sum(np.diff(idx) > 1)) + 1
    return float(z[idx[0]]), float(z[idx[-1]]), runs


def h_monotonicity_scan(grid: HMonotonicityGrid | None = None) -> ScanReport:
    """H(w1, w2, z) must strictly decrease in z throughout the admissible
    interval, for every admissible pair (w1, w2)."""
    grid = grid or HMonotonicityGrid()
    ws = np.linspace(grid.w_min, grid.w_max, grid.n_pairs)
    worst = np.inf
    worst_loc = None
    pairs_scanned = 0
    for w1 in ws:
        for w2 in ws:
            if w1 * w2 >= 1:
                continue
            z1, z2, runs = _interval_of_positive_det(w1, w2, grid.det_samples)
            if runs == 0:
                continue
            band = grid.edge_band * (z2 - z1)
            z = np.linspace(z1 + band, z2 - band, grid.z_steps)
            h, det = h_func_expanded(w1, w2, z, xy_entry=f_width_inv(w1 * w2))
            if np.any(det <= 0):
                keep = det > 0
                z, h = z[keep], h[keep]
                if len(z) < 2:
                    continue
            margin = float(-np.max(np.diff(h)))  # min decrease between steps
            pairs_scanned += 1
            if margin < worst:
                worst = margin
                worst_loc = (float(w1), float(w2))
    return ScanReport(
        name="h_monotonicity",
        grid=grid.describe(),
        passed=bool(worst > 0),
        worst_margin=float(worst),
        worst_location=worst_loc,
        details={"pairs_scanned": pairs_scanned},
    )


def u_interval_scan(x: float, y: float, n: int = 10_000) -> ScanReport:
    """The admissible z-set must be empty or a single contiguous interval."""
    if not (x > 0 and y > 0):
        raise ValueError("x and y must be positive")
    if not x * y < 1:
        raise ValueError("product xy must be < 1")
    z1, z2, runs = _interval_of_positive_det(x, y, n)
    return ScanReport(
        name="u_interval",
        grid=f"{n} z samples on (0, {1.0 / max(x, y):.6g})",
        passed=runs <= 1,
        worst_margin=float(1 - runs),
        worst_location=(x, y),
        details={"runs": runs, "z1": z1, "z2": z2},
    )


@dataclass(frozen=True)
class PInequalityGrid:
    """theta x u grid for the positivity scan, avoiding the removable zeros
    at u = theta (diagonal band) and at the endpoints u = 0, 2*pi - theta."""

    n_theta: int = 500
    n_u: int = 500
    theta_min: float = 0.01
    theta_max: float = float(np.pi) - 0.01
    diag_band: float = 1e-3

    def describe(self) -> str:
        return f"{self.n_theta} theta x {self.n_u} u, band {self.diag_band}"


def p_inequality_scan(grid: PInequalityGrid | None = None) -> ScanReport:
    grid = grid or PInequalityGrid()
    thetas = np.linspace(grid.theta_min, grid.theta_max, grid.n_theta)
    worst = np.inf
    worst_loc = None
    refined = 0
    for theta in thetas:
        u = np.linspace(0.0, 2 * np.pi - theta, grid.n_u + 2)[1:-1]
        u = u[np.abs(u - theta) >= grid.diag_band]
        vals = _p_inequality_lhs(u, theta)
        # points below the double-precision noise floor get a high-precision
        # re-evaluation so the sign is meaningful, not roundoff
        unsure = np.abs(vals) < 1e-13 * _p_inequality_noise_scale(u, theta)
        for j in np.flatnonzero(unsure):
            vals[j] = _p_inequality_lhs_mp(float(u[j]), float(theta))
            refined += 1
        i = int(np.argmin(vals))
        if vals[i] < worst:
            worst = float(vals[i])
            worst_loc = (float(u[i]), float(theta))
    return ScanReport(
        name="p_inequality",
        grid=grid.describe(),
        passed=bool(worst > 0),
        worst_margin=worst,
        worst_location=worst_loc,
        details={"points_refined": refined},
    )


def p_ordering_scan(n_theta: int = 20, n_u: int = 25) -> ScanReport:
    """P(u, theta) < P(theta) for u < theta and > for u > theta."""
    worst = np.inf
    worst_loc = None
    checked = 0
    for theta in np.linspace(0.1, 3.0, n_theta):
        below = np.linspace(theta * 0.02, theta * 0.98, n_u)
        above = np.linspace(theta + 0.02 * (2 * np.pi - 2 * theta),
                            2 * np.pi - theta - 0.02 * (2 * np.pi - 2 * theta), n_u)
        lim = p_limit(theta)
        for u in below:
            margin = lim - _p_func_arr(np.asarray(u), theta)
            checked += 1
            if margin < worst:
                worst, worst_loc = float(margin), (float(u), float(theta))
        for u in above:
            margin = _p_func_arr(np.asarray(u), theta) - lim
            checked += 1
            if margin < worst:
                worst, worst_loc = float(margin), (float(u), float(theta))
    return ScanReport(
        name="p_ordering",
        grid=f"{checked} (u, theta) points",
        passed=bool(worst > 0),
        worst_margin=float(worst),
        worst_location=worst_loc,
        details={},
    )


# ---------------------------------------------------------------------------
# concavity remarks and bounds

NONCONCAVITY_OFFDIAG = (0.93, 0.91, 0.90, 0.75, 0.77, 0.75)
NONCONCAVITY_DIFF = 0.0003994782
NONCONCAVITY_TOL = 1e-9


def nonconcavity_example() -> ScanReport:
    """The averaged matrix has the smaller value: concavity would force the
    opposite, so a positive difference refutes it."""
    m = CorrelationMatrix4(NONCONCAVITY_OFFDIAG)
    mbar = CorrelationMatrix4.equicorrelated(float(np.mean(NONCONCAVITY_OFFDIAG)))
    diff = closedform.f_max(m) - closedform.f_max(mbar)
    err = abs(diff - NONCONCAVITY_DIFF)
    return ScanReport(
        name="nonconcavity_example",
        grid="single matrix pair",
        passed=bool(err <= NONCONCAVITY_TOL and diff > 0),
        worst_margin=float(NONCONCAVITY_TOL - err),
        details={"difference": float(diff), "expected": NONCONCAVITY_DIFF},
    )


def nonobtuse_hessian_check(m: CorrelationMatrix4) -> ScanReport:
    """For a nonobtuse interior matrix: the negated Hessian has positive
    diagonal and positive determinant, and its non-diagonal part annihilates
    the complement vector."""
    d = derive(m)
    cosines = closedform.dihedral_cosines(m)
    # interior dihedral cosine = -outer cosine; nonobtuse means all >= 0
    if np.any(-cosines < 0):
        raise ObtuseInputError("tetrahedron has an obtuse dihedral angle")
    hess = closedform.hessian(m)
    neg = -hess
    phi = np.diag(np.arccos(cosines) / (8 * np.sqrt(np.pi ** 3 * d.lambda_prime ** 3)))
    psi = neg - phi
    v = d.lambda_prime
    kernel_resid = float(np.linalg.norm(psi @ v) / np.linalg.norm(v))
    diag_min = float(np.min(np.diag(neg)))
    det = float(np.linalg.det(neg))
    passed = diag_min > 0 and det > 0 and kernel_resid <= 1e-8
    return ScanReport(
        name="nonobtuse_hessian",
        grid="single matrix",
        passed=bool(passed),
        worst_margin=min(diag_min, det, 1e-8 - kernel_resid),
        details={"diag_min": diag_min, "det": det, "kernel_resid": kernel_resid},
    )


def sample_nonobtuse_interior(rng: np.random.Generator, max_tries: int = 10_000) -> CorrelationMatrix4:
    """Rejection-sample an interior matrix whose tetrahedron is strictly
    nonobtuse (all interior dihedral cosines >= 1e-6)."""
    for _ in range(max_tries):
        off = -0.25 + rng.uniform(-0.15, 0.15, size=6)
        m = CorrelationMatrix4(tuple(off))
        if classify(m).tag is not DomainTag.INTERIOR_S:
            continue
        if np.all(-closedform.dihedral_cosines(m) >= 1e-6):
            return m
    raise RuntimeError("failed to sample a nonobtuse interior matrix")


def bounds_check(m: CorrelationMatrix4) -> ScanReport:
    """Value bounds: sum(sqrt(1-corr)) / (4 sqrt pi) <= value <= same / 3."""
    if classify(m).tag is DomainTag.INVALID:
        raise ValueError("not a correlation matrix")
    s = float(np.sum(np.sqrt(np.clip(1.0 - m.array(), 0.0, None))))
    lower = s / (4 * np.sqrt(np.pi))
    upper = s / (3 * np.sqrt(np.pi))
    value = closedform.f_max(m)
    margin = min(value - lower, upper - value)
    return ScanReport(
        name="bounds",
        grid="single matrix",
        passed=bool(lower <= value <= upper or margin > -1e-12),
        worst_margin=float(margin),
        details={"lower": lower, "value": value, "upper": upper},
    )
