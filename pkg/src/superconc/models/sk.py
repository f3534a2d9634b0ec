"""Mixed p-spin (generalized SK) field with covariance xi(sigma . sigma' / n).

A configuration is coded by an integer whose bit i is set when
sigma_i = -1. For even mixtures X_sigma = X_{-sigma}, so the index set is
the quotient sigma_1 = +1 (codes with bit 0 clear).
"""
from __future__ import annotations

import math
from functools import partial

import numpy as np

from ..errors import BackendInfeasible
from ..field import CovarianceKernel, FieldSampler, cholesky_factor, sample_field
from ..series import XiSpec, parse_xi


def _table_cov(codes, table, i, j):
    return table[np.bitwise_count(codes[i] ^ codes[j])]

KERNEL_MAX_N = 14
DISORDER_MAX_P = 4
DISORDER_MAX_ENTRIES = 10**7
STATE_MAX_N = 22


def spin_codes(n: int, quotient: bool) -> np.ndarray:
    codes = np.arange(2**n, dtype=np.int64)
    return codes[(codes & 1) == 0] if quotient else codes


def spins_from_codes(codes, n: int) -> np.ndarray:
    bits = (np.asarray(codes)[..., None] >> np.arange(n)) & 1
    return 1.0 - 2.0 * bits


def spin_overlap(a, b, n: int):
    """sigma . sigma' / n from configuration codes."""
    diff = np.bitwise_count(np.bitwise_xor(np.asarray(a, np.int64), np.asarray(b, np.int64)))
    return (n - 2.0 * diff) / n


class MixedSKModel(FieldSampler):
    def __init__(self, n: int, xi, backend: str = "kernel"):
        if isinstance(xi, str):
            xi = parse_xi(xi)
        if n < 1:
            raise ValueError("n must be positive")
        if backend not in ("kernel", "disorder"):
            raise ValueError(f"unknown backend {backend!r}")
        self.n = int(n)
        self.xi = xi
        if backend == "kernel" and self.n > KERNEL_MAX_N:
            raise BackendInfeasible(f"kernel backend needs n <= {KERNEL_MAX_N}, got n={self.n}")
        if backend == "disorder":
            self._check_disorder()
        self.quotient = xi.is_even
        self.codes = spin_codes(self.n, self.quotient)
        self.size = len(self.codes)
        self.log_size = math.log(self.size)
        self.enumerable = True
        self.label = f"sk:n={n},xi={xi}"
        self._xi_table = np.asarray(xi((self.n - 2.0 * np.arange(self.n + 1)) / self.n), float)
        self.sigma_sq = float(self._xi_table[0])
        self.kernel = CovarianceKernel.implicit(
            partial(_table_cov, self.codes, self._xi_table), self.size, self.sigma_sq
        )
        if backend == "kernel":
            self._init_kernel()
        else:
            self.spins = spins_from_codes(self.codes, self.n)
            self.disorder_shape = (sum(self.n**p for p in self.orders),)
        self.backend = "cholesky" if backend == "kernel" else "disorder"

    def _init_kernel(self):
        self.kernel = CovarianceKernel.dense(self.kernel.matrix(max_size=2**KERNEL_MAX_N))
        self.factor = cholesky_factor(self.kernel)
        self.factor.setflags(write=False)
        self.disorder_shape = (self.size,)

    def _check_disorder(self):
        xi = self.xi
        if not xi.finite:
            raise BackendInfeasible("disorder backend needs a finite mixture")
        if xi.max_degree > DISORDER_MAX_P:
            raise BackendInfeasible(
                f"disorder backend needs max p <= {DISORDER_MAX_P}, got p={xi.max_degree}"
            )
        self.orders = [p for p in range(2, xi.max_degree + 1) if xi.coeffs[p] > 0]
        for p in self.orders:
            if self.n**p > DISORDER_MAX_ENTRIES:
                raise BackendInfeasible(
                    f"disorder tensor n^p = {self.n}^{p} exceeds {DISORDER_MAX_ENTRIES}"
                )
        if self.n > STATE_MAX_N:
            raise BackendInfeasible(f"enumerating 2^{self.n} configurations (n <= {STATE_MAX_N})")

    def field(self, z):
        if self.backend == "cholesky":
            return z @ self.factor.T
        n, b = self.n, z.shape[0]
        s = self.spins.T  # (n, S)
        out = np.zeros((b, self.size))
        off = 0
        for p in self.orders:
            g = z[:, off : off + n**p]
            off += n**p
            y = g.reshape(b, n ** (p - 1), n) @ s  # last index contracted
            for k in range(p - 1, 0, -1):
                y = (y.reshape(b, n ** (k - 1), n, self.size) * s[None, None]).sum(axis=2)
            out += math.sqrt(self.xi.coeffs[p]) * n ** (-p / 2) * y.reshape(b, self.size)
        return out

    @property
    def footprint(self):
        base = max(int(np.prod(self.disorder_shape)), self.size)
        if self.backend == "disorder":
            base = max(base, max(self.n ** (p - 1) for p in self.orders) * self.size)
        return base

    def spins_of(self, loc):
        return spins_from_codes(self.codes[np.asarray(loc)], self.n)


def sk_field(xi, n: int, backend: str, rng) -> np.ndarray:
    """One draw of X over the (possibly quotiented) configuration set."""
    return sample_field(MixedSKModel(n, xi, backend), rng)
