"""Replica engine and Monte Carlo point estimates with standard errors."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .rng import ReplicaBlock

# Fixed so that batched floating-point work (e.g. BLAS products) sees the
# same shapes no matter how many workers run.
BLOCK_SIZE = 1024
# Floats per array per block; large disorder shrinks the block instead.
BLOCK_BUDGET = 1 << 22


def block_size_for(footprint: int) -> int:
    """Replicas per block for a per-replica footprint (in floats)."""
    return int(min(BLOCK_SIZE, max(1, BLOCK_BUDGET // max(int(footprint), 1))))


@dataclass(frozen=True)
class MCConfig:
    n_samples: int = 100_000
    master_seed: int = 0
    n_workers: int = 1
    t_grid: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        if self.n_workers < 1:
            raise ValueError("n_workers must be positive")
        ts = tuple(float(t) for t in self.t_grid)
        if any(t < 0 for t in ts):
            raise ValueError("t_grid must be nonnegative")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("t_grid must be strictly increasing")
        object.__setattr__(self, "t_grid", ts)

    def replace(self, **changes) -> "MCConfig":
        kw = dict(
            n_samples=self.n_samples,
            master_seed=self.master_seed,
            n_workers=self.n_workers,
            t_grid=self.t_grid,
        )
        kw.update(changes)
        return MCConfig(**kw)


@dataclass(frozen=True)
class EstimateWithSE:
    value: float
    se: float
    n: int

    def z_against(self, target: float) -> float:
        if self.se == 0:
            return 0.0 if self.value == target else math.copysign(math.inf, self.value - target)
        return (self.value - target) / self.se

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.value - target) <= k * self.se

    def as_dict(self) -> dict:
        return {"value": self.value, "se": self.se, "n": self.n}


def combined_se(*ses: float) -> float:
    return math.sqrt(sum(s * s for s in ses))


def mean_estimate(x) -> EstimateWithSE:
    x = np.asarray(x, dtype=float)
    n = x.size
    return EstimateWithSE(float(x.mean()), float(x.std(ddof=1) / math.sqrt(n)), n)


def variance_estimate(x) -> EstimateWithSE:
    """Unbiased sample variance; SE from the fourth central moment."""
    x = np.asarray(x, dtype=float)
    n = x.size
    d = x - x.mean()
    s2 = float(d @ d) / (n - 1)
    m4 = float(np.mean(d**4))
    var_s2 = (m4 - s2 * s2 * (n - 3) / (n - 1)) / n
    return EstimateWithSE(s2, math.sqrt(max(var_s2, 0.0)), n)


def proportion_estimate(hits) -> EstimateWithSE:
    hits = np.asarray(hits, dtype=bool)
    n = hits.size
    p = float(hits.mean())
    return EstimateWithSE(p, math.sqrt(p * (1 - p) / n), n)


def _run_block(fn, master_seed, bounds):
    start, stop = bounds
    return fn(ReplicaBlock(master_seed, start, stop))


def run_replicas(fn, cfg: MCConfig, n_samples: int | None = None, block_size: int = BLOCK_SIZE):
    """Apply ``fn(block)`` to every replica block and concatenate in order.

    ``fn`` returns an array (or a tuple of arrays) with leading dimension
    ``len(block)``. With ``n_workers > 1`` blocks run in worker processes,
    so ``fn`` must be picklable (a module-level function or a partial).
    Block boundaries depend only on ``n_samples`` and ``block_size``.
    """
    n = cfg.n_samples if n_samples is None else n_samples
    bounds = [(s, min(s + block_size, n)) for s in range(0, n, block_size)]
    if cfg.n_workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.n_workers) as pool:
            parts = list(
                pool.map(_run_block, [fn] * len(bounds), [cfg.master_seed] * len(bounds), bounds)
            )
    else:
        parts = [_run_block(fn, cfg.master_seed, b) for b in bounds]
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(p) for p in zip(*parts))
    return np.concatenate(parts)
