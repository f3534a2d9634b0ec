"""Small reference fields: i.i.d., equicorrelated, and arbitrary dense."""
from __future__ import annotations

import math
from functools import partial

import numpy as np

from ..field import CovarianceKernel, DenseSampler, FieldSampler


# kernel functions live at module level so samplers pickle for worker processes
def _diag_cov(v, i, j):
    return np.where(i == j, v, 0.0)


def _equi_cov(r, i, j):
    return np.where(i == j, 1.0, r)


class IIDSampler(FieldSampler):
    """n independent N(0, var) coordinates; no factorization needed."""

    enumerable = True

    def __init__(self, n: int, var: float = 1.0):
        if n < 1:
            raise ValueError("n must be positive")
        if not var > 0:
            raise ValueError("var must be positive")
        self.n = self.size = int(n)
        self.var = self.sigma_sq = float(var)
        self.log_size = math.log(n)
        self.disorder_shape = (self.n,)
        self.kernel = CovarianceKernel.implicit(partial(_diag_cov, self.var), self.n, self.var)
        self.label = f"iid:n={n}" + (f",var={var:g}" if var != 1.0 else "")

    def field(self, z):
        return z if self.var == 1.0 else math.sqrt(self.var) * z


class EquicorrelatedSampler(FieldSampler):
    """Unit-variance coordinates with common correlation rho in [0, 1)."""

    enumerable = True

    def __init__(self, n: int, rho: float):
        if n < 1:
            raise ValueError("n must be positive")
        if not 0 <= rho < 1:
            raise ValueError("rho must lie in [0, 1)")
        self.n = self.size = int(n)
        self.rho = float(rho)
        self.sigma_sq = 1.0
        self.log_size = math.log(n)
        self.disorder_shape = (self.n + 1,)
        self.kernel = CovarianceKernel.implicit(partial(_equi_cov, self.rho), self.n, 1.0)
        self.label = f"equi:n={n},rho={rho:g}"

    def field(self, z):
        return math.sqrt(self.rho) * z[:, :1] + math.sqrt(1.0 - self.rho) * z[:, 1:]


def dense_sampler(matrix, label="dense") -> DenseSampler:
    return DenseSampler(CovarianceKernel.dense(matrix), label=label)
