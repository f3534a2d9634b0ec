"""Directed polymer on the triangular slab {v in Z_+^2 : v_1 + v_2 <= n - 1}.

Paths start at the origin and take n - 1 unit steps, each to the right
(x + 1) or up (y + 1). The environment is packed by anti-diagonal level
d = x + y and, within a level, by x, so vertex (x, d - x) sits at
d (d + 1) / 2 + x. A path is stored as the array of its x-coordinates per
level; two paths share the vertex at level d exactly when those agree.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from ..errors import LengthMismatch, TooLarge
from ..field import ArgmaxRecord, CovarianceKernel, FieldSampler, _draw_single, _ou
from ..rng import RngStream

ENUMERATION_LIMIT = 16


def slab_size(n: int) -> int:
    return n * (n + 1) // 2


def slab_index(x, y):
    d = np.asarray(x) + np.asarray(y)
    return d * (d + 1) // 2 + np.asarray(x)


def slab_vertices(n: int):
    return [(x, d - x) for d in range(n) for x in range(d + 1)]


def pack_env(grid, n: int) -> np.ndarray:
    """Packed environment from a 2-D table indexed [x, y]."""
    grid = np.asarray(grid, dtype=float)
    xs, ys = np.array(slab_vertices(n)).T
    return grid[xs, ys]


def _dp(env, n):
    """Batched max-weight path. env has shape (B, n(n+1)/2)."""
    b = env.shape[0]
    rows = np.arange(b)
    w = env[:, :1].copy()
    took_right = []
    for d in range(1, n):
        off = slab_size(d)
        from_left = np.full((b, d + 1), -np.inf)
        from_left[:, 1:] = w
        from_below = np.full((b, d + 1), -np.inf)
        from_below[:, :d] = w
        right = from_left > from_below
        w = env[:, off : off + d + 1] + np.where(right, from_left, from_below)
        took_right.append(right)
    end = np.argmax(w, axis=1)
    value = w[rows, end]
    xs = np.empty((b, n), dtype=np.int64)
    xs[:, n - 1] = end
    for d in range(n - 1, 0, -1):
        xs[:, d - 1] = xs[:, d] - took_right[d - 1][rows, xs[:, d]]
    return xs, value


def _to_vertices(xs):
    return tuple((int(x), d - int(x)) for d, x in enumerate(xs))


def polymer_ground_state(env, n: int):
    """Max-weight path and its weight.

    ``env`` is either packed (length n(n+1)/2) or a 2-D table g[x, y].
    """
    env = np.asarray(env, dtype=float)
    if env.ndim == 2:
        env = pack_env(env, n)
    if env.shape != (slab_size(n),):
        raise LengthMismatch(f"environment has {env.size} entries, need {slab_size(n)}")
    xs, value = _dp(env[None], n)
    return _to_vertices(xs[0]), float(value[0])


def polymer_overlap(p, q) -> int:
    """Number of vertices shared by two paths (given as vertex sequences)."""
    if len(p) != len(q):
        raise LengthMismatch(f"paths of lengths {len(p)} and {len(q)}")
    return len(set(map(tuple, p)) & set(map(tuple, q)))


def all_paths(n: int) -> np.ndarray:
    """x-coordinates of all 2^(n-1) paths, shape (2^(n-1), n)."""
    if n > ENUMERATION_LIMIT:
        raise TooLarge(f"enumerating 2^{n - 1} paths")
    if n == 1:
        return np.zeros((1, 1), dtype=np.int64)
    steps = np.array(list(itertools.product((0, 1), repeat=n - 1)), dtype=np.int64)
    return np.concatenate([np.zeros((len(steps), 1), np.int64), np.cumsum(steps, 1)], 1)


def path_incidence(n: int) -> np.ndarray:
    xs = all_paths(n)
    inc = np.zeros((len(xs), slab_size(n)))
    levels = np.arange(n)
    inc[np.arange(len(xs))[:, None], slab_index(xs, levels - xs)] = 1.0
    return inc


def brute_force_ground_state(env, n: int):
    """Exhaustive oracle: weight of every path, then the best one."""
    env = np.asarray(env, dtype=float)
    if env.ndim == 2:
        env = pack_env(env, n)
    xs = all_paths(n)
    weights = path_incidence(n) @ env
    k = int(np.argmax(weights))
    return _to_vertices(xs[k]), float(weights[k])


class PolymerModel(FieldSampler):
    """Path-weight field X_p = sum of i.i.d. N(0,1) weights along p.

    Locations are x-coordinate arrays; overlap is |p & p'|.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = int(n)
        self.size = 2 ** (self.n - 1)
        self.log_size = (self.n - 1) * math.log(2.0)
        self.sigma_sq = float(self.n)
        self.disorder_shape = (slab_size(self.n),)
        self.enumerable = self.n <= ENUMERATION_LIMIT
        self.label = f"polymer:n={n}"
        self._inc = None
        if self.enumerable:
            self._paths = all_paths(self.n)
            self.kernel = CovarianceKernel.implicit(self._path_overlap, self.size, self.sigma_sq)

    @property
    def footprint(self):
        return int(np.prod(self.disorder_shape))

    def _path_overlap(self, i, j):
        return np.count_nonzero(self._paths[i] == self._paths[j], axis=-1).astype(float)

    def field(self, z):
        """All path weights (small n only), ordered like ``all_paths``."""
        if not self.enumerable:
            raise TooLarge(f"enumerating 2^{self.n - 1} paths")
        if self._inc is None:
            self._inc = path_incidence(self.n)
        return z @ self._inc.T

    def locate_max(self, z):
        return _dp(z, self.n)

    def value_at(self, z, loc):
        idx = slab_index(loc, np.arange(self.n) - loc)
        return np.take_along_axis(z, idx, axis=1).sum(axis=1)

    def overlap(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        return np.count_nonzero(a == b, axis=-1).astype(float)


def polymer_coupled_run(n: int, t: float, rng: RngStream) -> ArgmaxRecord:
    """Ground states of an environment and its OU perturbation at time t."""
    if not t >= 0:
        raise ValueError("t must be nonnegative")
    model = PolymerModel(n)
    z0, z1 = _draw_single(model, rng)
    xs0, m0 = _dp(z0, n)
    if t == 0:
        xst, mt = xs0, m0
    else:
        xst, mt = _dp(_ou(z0, z1, t), n)
    return ArgmaxRecord(
        _to_vertices(xs0[0]), _to_vertices(xst[0]), float(m0[0]), float(mt[0]),
        float(model.overlap(xs0, xst)[0]),
    )
