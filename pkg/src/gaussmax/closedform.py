"""Closed-form expected maximum of a 4-D centered unit-variance Gaussian
vector, with exact first and second derivatives in the six correlations.

Everything is evaluated from the derived quantities of ``corrmat``; the
same complement table drives the value, gradient and Hessian so the three
stay consistent by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corrmat import (
    EPS_ONE,
    EPS_PSD,
    PAIR_COMPLEMENT,
    PAIR_INDEX,
    PAIRS,
    CorrelationMatrix4,
    DomainTag,
    classify,
    derive,
    triangle_factor,
)

SQRT_PI3 = float(np.sqrt(np.pi ** 3))

# Clamp tolerance for arccos arguments: excursions beyond it indicate a broken
# derived quantity rather than roundoff.
EPS_CLAMP = 1e-9
# Both the quadratic combination and the radical below this magnitude are
# treated as the 0/0 = 1 limit (the term then contributes nothing).
EPS_ZERO_OVER_ZERO = 1e-14

# Upper bound for the value on coplanar configurations, 4*pi / (2*sqrt(pi^3)).
COPLANAR_BOUND = float(4 * np.pi / (2 * SQRT_PI3))


def _safe_arccos_arg(lt: np.ndarray, rad_sq: np.ndarray) -> np.ndarray:
    """arccos argument lt / sqrt(rad_sq) with the 0/0 -> 1 convention and
    clamping to [-1, 1] within EPS_CLAMP."""
    lt = np.atleast_1d(np.asarray(lt, dtype=float))
    rad_sq = np.atleast_1d(np.asarray(rad_sq, dtype=float))
    rad = np.sqrt(np.maximum(rad_sq, 0.0))
    degenerate = rad < EPS_ZERO_OVER_ZERO
    arg = np.where(degenerate, 1.0, lt / np.where(degenerate, 1.0, rad))
    if np.any(np.abs(arg) > 1.0 + EPS_CLAMP):
        raise ValueError(f"arccos argument out of range: {arg}")
    return np.clip(arg, -1.0, 1.0)


def dihedral_cosines(m: CorrelationMatrix4) -> np.ndarray:
    """The six arccos arguments of the closed form, in pair storage order.

    Entry (k, l) equals the cosine of the outer dihedral angle along edge
    (k, l) of the embedded tetrahedron.
    """
    d = derive(m)
    rad_sq = d.lambda_prime * d.a_tilde ** 2 + d.lambda_tilde ** 2
    return _safe_arccos_arg(d.lambda_tilde, rad_sq)


def _dedupe_classes(m: CorrelationMatrix4) -> list[int]:
    """Union-find over vertices joined by a correlation equal to 1; returns
    one representative vertex per class, in increasing order."""
    parent = list(range(4))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    off = m.array()
    for t, (i, j) in enumerate(PAIRS):
        if off[t] >= 1.0 - EPS_ONE:
            parent[find(i)] = find(j)
    return sorted({find(i) for i in range(4)})


def f_max3(r12: float, r13: float, r23: float) -> float:
    """Expected maximum of a 3-D centered unit-variance Gaussian vector."""
    mat = np.array([[1.0, r12, r13], [r12, 1.0, r23], [r13, r23, 1.0]])
    if np.linalg.eigvalsh(mat)[0] < -EPS_PSD:
        raise ValueError("3x3 correlation matrix is not positive semidefinite")
    c = np.clip(1.0 - np.array([r12, r13, r23]), 0.0, None)
    return float(np.sum(np.sqrt(c)) / (2 * np.sqrt(np.pi)))


def _f_max_degenerate(m: CorrelationMatrix4) -> float:
    """Value when some correlation equals 1: drop duplicated variables and
    fall back to the 3-, 2- or 1-variable formula."""
    reps = _dedupe_classes(m)
    mat = m.matrix()
    if len(reps) >= 4:  # a unit pair always merges two vertices
        raise AssertionError("degenerate dispatch called without a unit pair")
    if len(reps) == 3:
        a, b, c = reps
        return f_max3(mat[a, b], mat[a, c], mat[b, c])
    if len(reps) == 2:
        a, b = reps
        return float(np.sqrt(max(1.0 - mat[a, b], 0.0) / np.pi))
    return 0.0


def f_max(m: CorrelationMatrix4) -> float:
    """Expected maximum of the 4 coordinates, exact closed form."""
    cls = classify(m)
    if cls.tag is DomainTag.INVALID:
        raise ValueError("not a correlation matrix")
    if cls.tag is DomainTag.DEGENERATE_UNIT_PAIR:
        return _f_max_degenerate(m)
    d = derive(m)
    rad_sq = d.lambda_prime * d.a_tilde ** 2 + d.lambda_tilde ** 2
    arg = _safe_arccos_arg(d.lambda_tilde, rad_sq)
    return float(np.sum(np.sqrt(np.clip(d.lambda_prime, 0.0, None)) * np.arccos(arg))
                 / (2 * SQRT_PI3))


def gradient(m: CorrelationMatrix4) -> np.ndarray:
    """The six partial derivatives of f_max, storage order; all negative."""
    cls = classify(m)
    if cls.tag in (DomainTag.INVALID, DomainTag.DEGENERATE_UNIT_PAIR):
        raise ValueError("gradient requires all correlations != 1")
    d = derive(m)
    rad_sq = d.lambda_prime * d.a_tilde ** 2 + d.lambda_tilde ** 2
    arg = _safe_arccos_arg(d.lambda_tilde, rad_sq)
    return -np.arccos(arg) / (4 * np.sqrt(np.pi ** 3 * d.lambda_prime))


def hessian(m: CorrelationMatrix4) -> np.ndarray:
    """Symmetric 6x6 matrix of second partials of f_max (interior only)."""
    if classify(m).tag is not DomainTag.INTERIOR_S:
        raise ValueError("hessian requires an interior (positive definite) matrix")
    d = derive(m)
    lp, lt, at = d.lambda_prime, d.lambda_tilde, d.a_tilde
    rad_sq = lp * at ** 2 + lt ** 2
    arg = _safe_arccos_arg(lt, rad_sq)
    h = np.empty((6, 6))
    for s, (k, l) in enumerate(PAIRS):
        mm, nn = PAIR_COMPLEMENT[s]
        d1 = triangle_factor(lp, (k, l, mm))
        d2 = triangle_factor(lp, (k, l, nn))
        bracket = (
            lt[PAIR_INDEX[(k, mm)]]
            * (lp[s] + lp[PAIR_INDEX[(l, mm)]] - lp[PAIR_INDEX[(k, mm)]]) / d1
            + lt[PAIR_INDEX[(k, nn)]]
            * (lp[s] + lp[PAIR_INDEX[(l, nn)]] - lp[PAIR_INDEX[(k, nn)]]) / d2
        )
        h[s, s] = (
            -np.arccos(arg[s]) / (8 * np.sqrt(np.pi ** 3 * lp[s] ** 3))
            + bracket / (4 * SQRT_PI3 * lp[s] * at)
        )
        for t in range(s + 1, 6):
            p, q = PAIRS[t]
            shared = {k, l} & {p, q}
            if not shared:
                val = -1.0 / (2 * SQRT_PI3 * at)
            else:
                sh = shared.pop()
                i = ({k, l} - {sh}).pop()
                j = ({p, q} - {sh}).pop()
                dfac = triangle_factor(lp, (sh, i, j))
                val = -lt[PAIR_INDEX[(i, j)]] / (2 * SQRT_PI3 * at * dfac)
            h[s, t] = h[t, s] = val
    return h


@dataclass(frozen=True)
class QuadrantIntegralParams:
    """Positive-definite 2x2 quadratic form (a1, c1; c1, b1) and a scale."""

    a1: float
    b1: float
    c1: float
    scale: float

    def __post_init__(self):
        if not (self.a1 > 0 and self.b1 > 0):
            raise ValueError("diagonal entries must be positive")
        if self.a1 * self.b1 - self.c1 ** 2 <= 0:
            raise ValueError("form must be positive definite")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def quadrant_integral(p: QuadrantIntegralParams) -> float:
    """Integral over the positive quadrant of
    exp(-(a1 y^2 + b1 z^2 + 2 c1 y z) / (2 scale^2))."""
    disc = p.a1 * p.b1 - p.c1 ** 2
    return float(p.scale ** 2 / np.sqrt(disc) * np.arccos(p.c1 / np.sqrt(p.a1 * p.b1)))


def density(m: CorrelationMatrix4, x) -> float:
    """Gaussian density with covariance m at the 4-vector x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise ValueError("x must be a 4-vector")
    mat = m.matrix()
    det = np.linalg.det(mat)
    if det <= EPS_PSD:
        raise ValueError("density requires a nonsingular matrix")
    quad = x @ np.linalg.solve(mat, x)
    return float(np.exp(-0.5 * quad) / np.sqrt((2 * np.pi) ** 4 * det))
