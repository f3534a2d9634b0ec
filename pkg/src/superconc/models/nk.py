"""NK fitness landscape with wraparound windows.

Genome s in {0, ..., 2^N - 1} has sigma_i = bit i of s. The window at site i
is (sigma_i, ..., sigma_{i+K}) with indices mod N, coded as the integer
whose bit j is sigma_{i+j}. Then F(s) = sum_i Y[i, window_i(s)].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from ..errors import LengthMismatch, TooLarge
from ..field import CovarianceKernel, FieldSampler


def _window_cov(w, i, j):
    return np.count_nonzero(w[i] == w[j], axis=-1).astype(float)

MAX_N = 22
SUB_BATCH_FLOATS = 1 << 22


def _check(N, K):
    if N < 1:
        raise ValueError("N must be positive")
    if not 0 <= K <= N - 1:
        raise ValueError("K must satisfy 0 <= K <= N - 1")
    if N > MAX_N:
        raise TooLarge(f"N={N} exceeds the enumeration limit {MAX_N}")


def window_codes(N: int, K: int, genomes=None) -> np.ndarray:
    """Window codes, shape (len(genomes), N); all genomes by default."""
    if genomes is None:
        genomes = np.arange(2**N, dtype=np.int64)
    genomes = np.asarray(genomes, dtype=np.int64)
    sites = np.arange(N)
    out = np.zeros(genomes.shape + (N,), dtype=np.int64)
    for j in range(K + 1):
        out |= ((genomes[..., None] >> ((sites + j) % N)) & 1) << j
    return out


@dataclass(frozen=True)
class NKModel:
    """One landscape: a table Y of shape (N, 2^(K+1))."""

    N: int
    K: int
    table: np.ndarray

    def __post_init__(self):
        _check(self.N, self.K)
        if np.shape(self.table) != (self.N, 2 ** (self.K + 1)):
            raise LengthMismatch(f"table must have shape {(self.N, 2 ** (self.K + 1))}")

    @classmethod
    def random(cls, N, K, rng):
        gen = rng.generator() if hasattr(rng, "generator") else rng
        return cls(N, K, gen.standard_normal((N, 2 ** (K + 1))))


def nk_fitness_table(model: NKModel) -> np.ndarray:
    _check(model.N, model.K)
    w = window_codes(model.N, model.K)
    y = np.asarray(model.table, dtype=float)
    return y[np.arange(model.N), w].sum(axis=1)


def _as_genome(s, N):
    if np.ndim(s) == 0:
        return int(s)
    bits = np.asarray(s, dtype=np.int64)
    if bits.shape != (N,):
        raise LengthMismatch(f"genome of length {bits.size}, expected {N}")
    return int((bits << np.arange(N)).sum())


def nk_proximity(s, t, N: int, K: int) -> int:
    """Number of sites whose windows agree; genomes as bit sequences or ints."""
    if not 0 <= K <= N - 1:
        raise ValueError("K must satisfy 0 <= K <= N - 1")
    a = window_codes(N, K, [_as_genome(s, N)])[0]
    b = window_codes(N, K, [_as_genome(t, N)])[0]
    return int(np.count_nonzero(a == b))


class NKSampler(FieldSampler):
    enumerable = True

    def __init__(self, N: int, K: int):
        _check(N, K)
        self.N, self.K = int(N), int(K)
        self.size = 2**self.N
        self.log_size = self.N * math.log(2.0)
        self.sigma_sq = float(self.N)
        self.disorder_shape = (self.N, 2 ** (self.K + 1))
        self.windows = window_codes(self.N, self.K)
        self.windows.setflags(write=False)
        self.kernel = CovarianceKernel.implicit(
            partial(_window_cov, self.windows), self.size, self.sigma_sq
        )
        self.label = f"nk:N={N},K={K}"

    def field(self, z):
        b = z.shape[0]
        out = np.empty((b, self.size))
        step = max(1, SUB_BATCH_FLOATS // self.size)
        for lo in range(0, b, step):
            zz = z[lo : lo + step]
            acc = np.zeros((zz.shape[0], self.size))
            for i in range(self.N):
                acc += zz[:, i, self.windows[:, i]]
            out[lo : lo + step] = acc
        return out
