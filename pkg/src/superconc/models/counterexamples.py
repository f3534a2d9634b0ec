"""Two fields separating multiple peaks from chaos.

Field A has n blocks k = 0..n-1 of 2^n sites each. Block k holds
Y^k_f = sum_i g^k_{i f(i)} / sqrt n for f in {0,1}^n, and
X^k_f = Y^0_f in block 0, rho Y^k_f + sqrt(1 - rho^2) Z_k otherwise,
with rho = 1 - n^{-1/3}. Site (k, f) is encoded as k 2^n + f, where bit i
of f is f(i). It has many near-maximal, nearly orthogonal sites, yet the
argmax is stable under perturbation.

Field B is indexed by all maps f: {1..n} -> {1..n}, X_f = sum_i g_{i f(i)}
/ sqrt n. Its maximizer is f*(i) = argmax_j g_ij, so it is never
enumerated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import TooLarge
from ..field import CovarianceKernel, FieldSampler

CE_A_MAX_N = 20
CE_B_MAX_N = 10_000
SUB_BATCH_FLOATS = 1 << 22


def ce_a_rho(n: int) -> float:
    return 1.0 - n ** (-1.0 / 3.0)


class CEFieldA(FieldSampler):
    enumerable = True

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        if n > CE_A_MAX_N:
            raise TooLarge(f"n={n} exceeds {CE_A_MAX_N} for explicit enumeration")
        self.n = int(n)
        self.rho = ce_a_rho(self.n)
        self.size = self.n * 2**self.n
        self.log_size = math.log(self.n) + self.n * math.log(2.0)
        self.sigma_sq = 1.0
        # row k: g^k_{i0} (n entries), g^k_{i1} (n entries), Z_k
        self.disorder_shape = (self.n, 2 * self.n + 1)
        self.a = np.full(self.n, self.rho)
        self.a[0] = 1.0
        self.b = np.sqrt(1.0 - self.a**2)
        self.label = f"ce_a:n={n}"
        self.kernel = CovarianceKernel.implicit(self._cov, self.size, 1.0)

    def _split(self, loc):
        loc = np.asarray(loc, dtype=np.int64)
        return loc >> self.n, loc & (2**self.n - 1)

    def _cov(self, i, j):
        ki, fi = self._split(i)
        kj, fj = self._split(j)
        agree = (self.n - np.bitwise_count(fi ^ fj)) / self.n
        r2 = self.rho**2
        within = np.where(ki == 0, agree, r2 * agree + 1.0 - r2)
        return np.where(ki == kj, within, 0.0)

    def _parts(self, z):
        n = self.n
        return z[..., :n], z[..., n : 2 * n], z[..., 2 * n]

    def block_maxima(self, z):
        """Per-block maxima and maximizers, each of shape (B, n)."""
        g0, g1, zk = self._parts(z)
        ymax = np.maximum(g0, g1).sum(axis=-1) / math.sqrt(self.n)
        f = ((g1 > g0).astype(np.int64) << np.arange(self.n)).sum(axis=-1)
        return self.a * ymax + self.b * zk, f

    def locate_max(self, z):
        m, f = self.block_maxima(z)
        k = np.argmax(m, axis=1)
        rows = np.arange(z.shape[0])
        return (k << self.n) + f[rows, k], m[rows, k]

    def value_at(self, z, loc):
        k, f = self._split(loc)
        rows = np.arange(z.shape[0])
        g0, g1, zk = self._parts(z[rows, k])
        bits = (f[:, None] >> np.arange(self.n)) & 1
        y = np.where(bits == 1, g1, g0).sum(axis=1) / math.sqrt(self.n)
        return self.a[k] * y + self.b[k] * zk

    def field(self, z):
        n = self.n
        bits = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(float)
        out = np.empty((z.shape[0], self.size))
        step = max(1, SUB_BATCH_FLOATS // self.size)
        for lo in range(0, z.shape[0], step):
            g0, g1, zk = self._parts(z[lo : lo + step])
            y = (g0.sum(-1)[..., None] + (g1 - g0) @ bits.T) / math.sqrt(n)
            x = self.a[:, None] * y + self.b[:, None] * zk[..., None]
            out[lo : lo + step] = x.reshape(x.shape[0], -1)
        return out


class CEFieldB(FieldSampler):
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        if n > CE_B_MAX_N:
            raise TooLarge(f"n={n} exceeds {CE_B_MAX_N}")
        self.n = int(n)
        self.size = self.n**self.n
        self.log_size = self.n * math.log(self.n)
        self.sigma_sq = 1.0
        self.disorder_shape = (self.n, self.n)
        self.label = f"ce_b:n={n}"

    def locate_max(self, z):
        f = np.argmax(z, axis=-1)
        return f, np.take_along_axis(z, f[..., None], -1)[..., 0].sum(-1) / math.sqrt(self.n)

    def value_at(self, z, loc):
        return np.take_along_axis(z, np.asarray(loc)[..., None], -1)[..., 0].sum(-1) / math.sqrt(
            self.n
        )

    def overlap(self, a, b):
        return np.mean(np.asarray(a) == np.asarray(b), axis=-1)


@dataclass(frozen=True)
class CEASample:
    M: float
    block_max: np.ndarray
    block_argmax: np.ndarray  # f_k as bit codes
    argmax: int  # encoded k 2^n + f


@dataclass(frozen=True)
class CEBSample:
    M: float
    fstar: np.ndarray


def _disorder(sampler, rng):
    gen = rng.generator() if hasattr(rng, "generator") else rng
    return gen.standard_normal(sampler.disorder_shape)[None]


def ce_a_sample(n: int, rng) -> CEASample:
    s = CEFieldA(n)
    z = _disorder(s, rng)
    m, f = s.block_maxima(z)
    loc, best = s.locate_max(z)
    return CEASample(float(best[0]), m[0], f[0], int(loc[0]))


def ce_b_sample(n: int, rng) -> CEBSample:
    s = CEFieldB(n)
    f, m = s.locate_max(_disorder(s, rng))
    return CEBSample(float(m[0]), f[0])
