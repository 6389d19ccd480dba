"""Projected gradient ascent over the elliptope, certifying numerically that
the value is maximized exactly at the all-(-1/3) matrix.

The maximizer is singular, so the ascent must be able to ride the positive-
semidefinite boundary: feasibility is restored after every step by the
alternating-projection (Dykstra-corrected) nearest-correlation-matrix map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closedform
from .corrmat import PAIRS, CorrelationMatrix4, DomainTag, classify
from .verify import ScanReport

_ROWS = np.array([p[0] for p in PAIRS])
_COLS = np.array([p[1] for p in PAIRS])


@dataclass(frozen=True)
class AscentConfig:
    step_init: float = 0.1
    backtrack: float = 0.5
    armijo: float = 1e-4
    grad_tol: float = 1e-8      # on the projected-gradient norm at step_init
    value_tol: float = 1e-14    # accepted-step value gain below this stops; 0 disables
    max_iters: int = 10_000
    proj_tol: float = 1e-11
    keep_trajectory: bool = True


@dataclass(frozen=True)
class OptResult:
    argmax: CorrelationMatrix4
    value: float
    iterations: int
    trajectory_summary: tuple[tuple[float, float, float], ...]  # (value, step, proj residual)
    converged: bool


def _sym_from_off(off: np.ndarray) -> np.ndarray:
    m = np.eye(4)
    m[_ROWS, _COLS] = off
    m[_COLS, _ROWS] = off
    return m


def _project_arr(sym: np.ndarray, tol: float = 1e-11, max_iters: int = 1000):
    """Nearest correlation matrix by alternating projections between the PSD
    cone (with Dykstra correction) and the unit-diagonal affine set.

    Returns (matrix, fixed-point residual).  The default tolerance sits
    an order below the domain PSD tolerance so that projected iterates always
    classify as valid.
    """
    x = np.asarray(sym, dtype=float).copy()
    np.fill_diagonal(x, 1.0)
    correction = np.zeros_like(x)
    for _ in range(max_iters):
        adjusted = x - correction
        w, v = np.linalg.eigh(adjusted)
        psd = (v * np.clip(w, 0.0, None)) @ v.T
        correction = psd - adjusted
        x_new = psd.copy()
        np.fill_diagonal(x_new, 1.0)
        residual = float(np.max(np.abs(x_new - x)))
        x = x_new
        if residual < tol:
            return x, residual
    raise RuntimeError(f"projection did not reach residual {tol} in {max_iters} iterations")


def project_elliptope(sym, tol: float = 1e-11, max_iters: int = 1000) -> CorrelationMatrix4:
    """Nearest (Frobenius) correlation matrix to a symmetric 4x4 input."""
    sym = np.asarray(sym, dtype=float)
    if sym.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    if not np.all(np.isfinite(sym)):
        raise ValueError("entries must be finite")
    if np.max(np.abs(sym - sym.T)) > 1e-12:
        raise ValueError("matrix must be symmetric")
    x, _ = _project_arr(sym, tol=tol, max_iters=max_iters)
    return CorrelationMatrix4(tuple(np.clip(x[i, j], -1.0, 1.0) for i, j in PAIRS))


def maximize(start: CorrelationMatrix4, cfg: AscentConfig | None = None) -> OptResult:
    """Backtracking projected gradient ascent on the expected maximum."""
    cfg = cfg or AscentConfig()
    tag = classify(start).tag
    if tag in (DomainTag.INVALID, DomainTag.DEGENERATE_UNIT_PAIR):
        raise ValueError("start must have all correlations != 1")
    off = start.array().copy()
    value = closedform.f_max(CorrelationMatrix4(tuple(off)))
    trajectory: list[tuple[float, float, float]] = []
    converged = False
    iterations = 0
    for it in range(1, cfg.max_iters + 1):
        grad = closedform.gradient(CorrelationMatrix4(tuple(off)))
        cur = _sym_from_off(off)
        gmat = _sym_from_off(grad)
        np.fill_diagonal(gmat, 0.0)
        # the first trial doubles as the projected-gradient measurement
        eta = cfg.step_init
        cand, proj_res = _project_arr(cur + eta * gmat, tol=cfg.proj_tol)
        cand_off = np.clip(cand[_ROWS, _COLS], -1.0, 1.0)
        step = cand_off - off
        if float(np.linalg.norm(step)) / eta <= cfg.grad_tol:
            converged = True
            break
        accepted = False
        while eta > 1e-16:
            cand_val = closedform.f_max(CorrelationMatrix4(tuple(cand_off)))
            if cand_val >= value + cfg.armijo * float(grad @ step):
                accepted = True
                break
            eta *= cfg.backtrack
            cand, proj_res = _project_arr(cur + eta * gmat, tol=cfg.proj_tol)
            cand_off = np.clip(cand[_ROWS, _COLS], -1.0, 1.0)
            step = cand_off - off
        if not accepted:
            break
        delta = cand_val - value
        off, value = cand_off, cand_val
        iterations = it
        if cfg.keep_trajectory:
            trajectory.append((float(value), float(eta), float(proj_res)))
        if cfg.value_tol > 0 and delta <= cfg.value_tol:
            converged = True
            break
    argmax = CorrelationMatrix4(tuple(off))
    return OptResult(
        argmax=argmax,
        value=closedform.f_max(argmax),
        iterations=iterations,
        trajectory_summary=tuple(trajectory),
        converged=converged,
    )


EQUICORRELATED_OPTIMUM = -1.0 / 3.0
DIST_TOL = 1e-4


def optimal_value() -> float:
    """Closed-form value at the equicorrelated optimum."""
    return closedform.f_max(CorrelationMatrix4.equicorrelated(EQUICORRELATED_OPTIMUM))


def random_psd(rng: np.random.Generator, dim: int = 4) -> CorrelationMatrix4:
    """Gram matrix of four random unit vectors in R^dim."""
    a = rng.normal(size=(4, dim))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    g = a @ a.T
    return CorrelationMatrix4(tuple(np.clip(g[i, j], -1.0, 1.0) for i, j in PAIRS))


def random_interior(rng: np.random.Generator, min_eig: float = 0.05,
                    max_tries: int = 10_000) -> CorrelationMatrix4:
    for _ in range(max_tries):
        m = random_psd(rng)
        if np.linalg.eigvalsh(m.matrix())[0] > min_eig:
            return m
    raise RuntimeError("failed to sample an interior matrix")


def certify(res: OptResult, n_random: int = 100, seed: int = 20240401,
            dist_tol: float = DIST_TOL) -> ScanReport:
    """Certify a converged run: the value does not beat the equicorrelated
    closed form, the argmax sits at the equicorrelated point, and no random
    correlation matrix does better."""
    if not res.converged:
        raise ValueError("certify requires a converged result")
    target = optimal_value()
    value_ok = res.value <= target + 1e-9
    dist = float(np.max(np.abs(res.argmax.array() - EQUICORRELATED_OPTIMUM)))
    dist_ok = dist <= dist_tol
    rng = np.random.default_rng(seed)
    worst_random = -np.inf
    for _ in range(n_random):
        worst_random = max(worst_random, closedform.f_max(random_psd(rng)))
    random_ok = worst_random <= res.value + 1e-9
    return ScanReport(
        name="optimizer_certificate",
        grid=f"{n_random} random matrices, seed {seed}",
        passed=bool(value_ok and dist_ok and random_ok),
        worst_margin=float(min(target + 1e-9 - res.value, dist_tol - dist,
                               res.value + 1e-9 - worst_random)),
        details={
            "value": res.value,
            "target": target,
            "argmax_max_dev": dist,
            "worst_random_value": float(worst_random),
            "value_ok": bool(value_ok),
            "dist_ok": bool(dist_ok),
            "random_ok": bool(random_ok),
        },
    )
