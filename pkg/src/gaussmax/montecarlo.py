"""Monte-Carlo oracle: sampling X ~ N(0, corr) and estimating the expected
maximum and the four order-statistic means.

Reproducibility contract: results depend only on (matrix, n, seed, shards) --
never on thread count.  Shard s draws from Philox keyed by
SeedSequence(seed, spawn_key=(s,)), and shard partials are reduced in shard
order with exact summation.  Antithetic pairs (z, -z) are used throughout,
which makes the min/max symmetry of the order statistics exact in-sample.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corrmat import EPS_PSD, CorrelationMatrix4, DomainTag, classify

_BLOCK = 500_000  # pairs per shard block; bounds peak memory


def thread_count() -> int:
    """Worker threads, capped by the GAUSSMAX_THREADS env var (0 = auto)."""
    raw = os.environ.get("GAUSSMAX_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        return min(8, os.cpu_count() or 1)
    return cap


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class OrderStats:
    """Estimated means of the order statistics, largest (e1) to smallest (e4).

    se_third_identity / se_second_identity are the standard errors of the
    in-sample residuals e3 - 3*e1 and e2 + 3*e1 used by the order-statistic
    identity checks.
    """

    e1: float
    e2: float
    e3: float
    e4: float
    std_errors: tuple[float, float, float, float]
    se_third_identity: float
    se_second_identity: float
    n_samples: int
    seed: int


def sample_factor(m: CorrelationMatrix4) -> np.ndarray:
    """4x4 factor L with L @ L.T equal to the matrix: Cholesky when positive
    definite, eigen-based with eigenvalues clipped at 0 otherwise."""
    cls = classify(m)
    if cls.tag is DomainTag.INVALID:
        raise ValueError("not a correlation matrix")
    mat = m.matrix()
    if cls.tag is DomainTag.INTERIOR_S:
        return np.linalg.cholesky(mat)
    w, v = np.linalg.eigh(mat)
    if w[0] < -EPS_PSD:
        raise ValueError("not a correlation matrix")
    return v * np.sqrt(np.clip(w, 0.0, None))


def _shard_rng(seed: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(shard,))))


def _shard_sizes(pairs: int, shards: int) -> list[int]:
    base, extra = divmod(pairs, shards)
    return [base + (1 if s < extra else 0) for s in range(shards)]


def _default_shards(n: int) -> int:
    return max(1, math.ceil(n / 2_000_000))


def _check_args(n: int, shards):
    if n < 10_000:
        raise ValueError("need at least 10^4 samples")
    if n % 2:
        raise ValueError("antithetic sampling needs an even sample count")
    if shards is not None and shards < 1:
        raise ValueError("shards must be >= 1")


def _run_shards(worker, pairs: int, shards: int):
    sizes = _shard_sizes(pairs, shards)
    with ThreadPoolExecutor(max_workers=min(thread_count(), shards)) as pool:
        return list(pool.map(worker, range(shards), sizes))


def estimate_max(m: CorrelationMatrix4, n: int, seed: int, shards: int | None = None) -> MCEstimate:
    """Sample mean of max(X_1..X_4) over n draws (n/2 antithetic pairs)."""
    _check_args(n, shards)
    nshards = shards if shards is not None else _default_shards(n)
    lt = sample_factor(m).T
    pairs = n // 2

    def worker(shard: int, size: int):
        rng = _shard_rng(seed, shard)
        s = s2 = 0.0
        left = size
        while left > 0:
            b = min(left, _BLOCK)
            x = rng.standard_normal((b, 4)) @ lt
            hi = x.max(axis=1)
            lo = x.min(axis=1)
            # antithetic mate of each draw contributes max(-x) = -min(x)
            s += float(hi.sum() - lo.sum())
            s2 += float(hi @ hi + lo @ lo)
            left -= b
        return s, s2

    parts = _run_shards(worker, pairs, nshards)
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return MCEstimate(mean=mean, std_error=math.sqrt(var / n), n_samples=n, seed=seed)


def estimate_order_stats(m: CorrelationMatrix4, n: int, seed: int,
                         shards: int | None = None) -> OrderStats:
    """Means of the four order statistics over n draws (antithetic pairs)."""
    _check_args(n, shards)
    nshards = shards if shards is not None else _default_shards(n)
    lt = sample_factor(m).T
    pairs = n // 2

    def worker(shard: int, size: int):
        rng = _shard_rng(seed, shard)
        s = np.zeros(6)
        s2 = np.zeros(6)
        left = size
        while left > 0:
            b = min(left, _BLOCK)
            x = rng.standard_normal((b, 4)) @ lt
            asc = np.sort(x, axis=1)
            for desc in (asc[:, ::-1], -asc):  # draw and its antithetic mate
                r3 = desc[:, 2] - 3.0 * desc[:, 0]
                r2 = desc[:, 1] + 3.0 * desc[:, 0]
                cols = (desc[:, 0], desc[:, 1], desc[:, 2], desc[:, 3], r3, r2)
                for i, col in enumerate(cols):
                    s[i] += float(col.sum())
                    s2[i] += float(col @ col)
            left -= b
        return s, s2

    parts = _run_shards(worker, pairs, nshards)
    s = np.array([math.fsum(p[0][i] for p in parts) for i in range(6)])
    s2 = np.array([math.fsum(p[1][i] for p in parts) for i in range(6)])
    means = s / n
    var = np.maximum(s2 / n - means ** 2, 0.0)
    se = np.sqrt(var / n)
    return OrderStats(
        e1=means[0], e2=means[1], e3=means[2], e4=means[3],
        std_errors=tuple(se[:4]),
        se_third_identity=float(se[4]),
        se_second_identity=float(se[5]),
        n_samples=n, seed=seed,
    )
