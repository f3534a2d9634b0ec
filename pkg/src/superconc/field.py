"""Centered Gaussian fields on finite index sets and their OU coupling.

Every sampler here is driven linearly by a block of i.i.d. standard normal
"disorder". The Ornstein-Uhlenbeck pair ``(X, X^t)`` is formed at the
disorder level, which is equivalent to forming it on the field itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import DegenerateField, EmptyVector, LengthMismatch, NotPSD
from .montecarlo import EstimateWithSE, MCConfig, mean_estimate, run_replicas
from .rng import RngStream

T_INF = 50.0  # e^{-50} < 2e-22: indistinguishable from independence
RIDGE = 1e-12
RECONSTRUCTION_TOL = 1e-8
NONDEGENERACY_TOL = 1e-10

diagnostics = {"ties": 0}


class CovarianceKernel:
    """R(i, j) for a finite index set, either as a matrix or as a formula.

    ``func(i, j)`` for implicit kernels must broadcast over integer arrays.
    """

    def __init__(self, mode, size, sigma_sq, matrix=None, func=None):
        self.mode = mode
        self.size = size
        self.sigma_sq = float(sigma_sq)
        self._matrix = matrix
        self._func = func

    @classmethod
    def dense(cls, matrix, sym_tol=1e-12):
        a = np.array(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError("covariance matrix must be square and nonempty")
        diag = np.diag(a)
        sigma_sq = float(diag.max())
        if sigma_sq <= 0:
            raise ValueError("covariance has no positive diagonal entry")
        if np.max(np.abs(a - a.T)) > sym_tol * sigma_sq:
            raise ValueError("covariance matrix is not symmetric")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        return cls("dense", a.shape[0], sigma_sq, matrix=a)

    @classmethod
    def implicit(cls, func, size, sigma_sq):
        return cls("implicit", size, sigma_sq, func=func)

    def eval(self, i, j):
        if self.mode == "dense":
            return self._matrix[i, j]
        return self._func(np.asarray(i), np.asarray(j))

    def row(self, i):
        return self.eval(i, np.arange(self.size))

    def matrix(self, max_size=8192):
        if self._matrix is not None:
            return self._matrix
        if self.size > max_size:
            raise MemoryError(f"refusing to densify a kernel of size {self.size}")
        idx = np.arange(self.size)
        return np.asarray(self.eval(idx[:, None], idx[None, :]), dtype=float)


def cholesky_factor(kernel: CovarianceKernel) -> np.ndarray:
    if kernel.mode != "dense":
        raise ValueError("cholesky_factor needs a dense kernel")
    a = kernel.matrix()
    ridge = RIDGE * kernel.sigma_sq
    for attempt in (0.0, ridge):
        try:
            low = np.linalg.cholesky(a + attempt * np.eye(a.shape[0]))
        except np.linalg.LinAlgError:
            continue
        err = np.max(np.abs(low @ low.T - a))
        if err <= RECONSTRUCTION_TOL * kernel.sigma_sq:
            return low
    raise NotPSD("covariance is not positive semidefinite (ridge attempt failed)")


def check_nondegenerate(kernel: CovarianceKernel, chunk=1024):
    """Raise DegenerateField if Var(X_i - X_j) vanishes for some i != j."""
    a = kernel.matrix()
    d = np.diag(a)
    tol = NONDEGENERACY_TOL * kernel.sigma_sq
    for lo in range(0, a.shape[0], chunk):
        hi = min(lo + chunk, a.shape[0])
        gap = d[lo:hi, None] + d[None, :] - 2.0 * a[lo:hi]
        gap[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
        if np.min(gap) <= tol:
            i, j = np.unravel_index(np.argmin(gap), gap.shape)
            raise DegenerateField(f"coordinates {lo + i} and {j} coincide almost surely")


def _ou(z0, z1, t):
    t = np.minimum(np.asarray(t, dtype=float), T_INF)
    a = np.exp(-t)
    b = np.sqrt(-np.expm1(-2.0 * t))
    if a.ndim:
        extra = z0.ndim - a.ndim
        a = a.reshape(a.shape + (1,) * extra)
        b = b.reshape(b.shape + (1,) * extra)
    return a * z0 + b * z1


def ou_perturb(x0, xprime, t):
    """e^{-t} x0 + sqrt(1 - e^{-2t}) xprime, with t >= 50 treated as infinity."""
    x0 = np.asarray(x0, dtype=float)
    xprime = np.asarray(xprime, dtype=float)
    if x0.shape != xprime.shape:
        raise LengthMismatch(f"shapes {x0.shape} and {xprime.shape} differ")
    if not t >= 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return x0.copy()
    return _ou(x0, xprime, t)


def argmax_with_value(x):
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise EmptyVector("argmax of an empty vector")
    i = int(np.argmax(x))
    if np.count_nonzero(x == x[i]) > 1:
        diagnostics["ties"] += 1
    return i, float(x[i])


def _batched_argmax(x):
    idx = np.argmax(x, axis=-1)
    best = np.take_along_axis(x, idx[:, None], axis=-1)[:, 0]
    ties = np.count_nonzero(x == best[:, None], axis=-1) > 1
    if ties.any():
        diagnostics["ties"] += int(ties.sum())
    return idx, best


class FieldSampler:
    """A centered Gaussian field X = L(z) with z i.i.d. standard normal.

    Subclasses set ``disorder_shape``, ``sigma_sq``, ``size`` (None for a
    continuum index set), ``log_size`` and ``backend``, and implement
    either ``field`` (enumerable index sets) or ``locate_max``/``value_at``
    /``overlap`` directly. All methods act on a leading batch axis.
    """

    backend = "disorder"
    kernel = None
    enumerable = False
    nonnegative = True
    label = "field"

    def field(self, z):
        raise NotImplementedError(f"{type(self).__name__} cannot enumerate its index set")

    def locate_max(self, z):
        return _batched_argmax(self.field(z))

    def value_at(self, z, loc):
        x = self.field(z)
        return np.take_along_axis(x, np.asarray(loc)[:, None], axis=-1)[:, 0]

    def overlap(self, a, b):
        return np.asarray(self.kernel.eval(a, b), dtype=float)

    def loc_equal(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if a.ndim > 1:
            return np.all(a == b, axis=tuple(range(1, a.ndim)))
        return a == b

    @property
    def footprint(self):
        """Floats of per-replica working memory, used to size replica blocks."""
        n = int(np.prod(self.disorder_shape))
        if self.enumerable and self.size is not None:
            n = max(n, int(self.size))
        return n

    @property
    def unit_variance(self):
        return self.sigma_sq == 1.0

    def __repr__(self):
        return f"<{type(self).__name__} {self.label}>"


class DenseSampler(FieldSampler):
    """Cholesky sampler for an explicit covariance matrix."""

    backend = "cholesky"
    enumerable = True

    def __init__(self, kernel, label="dense", check_degenerate=True):
        if not isinstance(kernel, CovarianceKernel):
            kernel = CovarianceKernel.dense(kernel)
        if kernel.mode != "dense":
            kernel = CovarianceKernel.dense(kernel.matrix())
        if check_degenerate and kernel.size > 1:
            check_nondegenerate(kernel)
        self.kernel = kernel
        self.factor = cholesky_factor(kernel)
        self.factor.setflags(write=False)
        self.size = kernel.size
        self.log_size = math.log(kernel.size)
        self.sigma_sq = kernel.sigma_sq
        self.disorder_shape = (kernel.size,)
        self.nonnegative = bool(np.all(kernel.matrix() >= 0))
        self.label = label

    def field(self, z):
        return z @ self.factor.T


@dataclass(frozen=True)
class CoupledPair:
    x0: np.ndarray
    xt: np.ndarray
    t: float


@dataclass(frozen=True)
class ArgmaxRecord:
    i0: object
    it: object
    m0: float
    mt: float
    overlap: float


def _draw_single(sampler, rng: RngStream, uniform=False):
    gen = rng.generator()
    z0 = gen.standard_normal(sampler.disorder_shape)[None]
    z1 = gen.standard_normal(sampler.disorder_shape)[None]
    if uniform:
        return z0, z1, 1.0 - gen.random()
    return z0, z1


def sample_field(sampler: FieldSampler, rng: RngStream) -> np.ndarray:
    z = rng.generator().standard_normal(sampler.disorder_shape)[None]
    return sampler.field(z)[0]


def coupled_pair(sampler: FieldSampler, t: float, rng: RngStream) -> CoupledPair:
    z0, z1 = _draw_single(sampler, rng)
    x0 = sampler.field(z0)[0]
    xp = sampler.field(z1)[0]
    return CoupledPair(x0, ou_perturb(x0, xp, t), float(t))


def _record(sampler, z0, z1, t):
    loc0, m0 = sampler.locate_max(z0)
    if t == 0:
        loct, mt = loc0, m0
    else:
        loct, mt = sampler.locate_max(_ou(z0, z1, t))
    r = sampler.overlap(loc0, loct)
    unpack = (lambda v: v[0].item() if np.ndim(v[0]) == 0 else v[0])
    return ArgmaxRecord(unpack(loc0), unpack(loct), float(m0[0]), float(mt[0]), float(r[0]))


def coupled_argmax(sampler: FieldSampler, t: float, rng: RngStream) -> ArgmaxRecord:
    if not t >= 0:
        raise ValueError("t must be nonnegative")
    z0, z1 = _draw_single(sampler, rng)
    return _record(sampler, z0, z1, t)


def exp_time_overlap(sampler: FieldSampler, rng: RngStream) -> float:
    """R(I^0, I^tau) for tau ~ Exp(1) drawn as -log(U)."""
    z0, z1, u = _draw_single(sampler, rng, uniform=True)
    return _record(sampler, z0, z1, -math.log(u)).overlap


def _hyper_block(sampler, event_index, t, block):
    d = sampler.disorder_shape
    z0, z1 = block.draw(("normal", d), ("normal", d))
    loc0, _ = sampler.locate_max(z0)
    loct, _ = sampler.locate_max(_ou(z0, z1, t)) if t > 0 else (loc0, None)
    f0 = np.asarray(loc0) == event_index
    ft = np.asarray(loct) == event_index
    return f0.astype(float), (f0 & ft).astype(float)


def hyper_check(sampler: FieldSampler, event_index: int, t: float, cfg: MCConfig):
    """Estimate E f(X)f(X^t) and (E f)^{1+tanh(t/2)} for f = 1{argmax = event}."""
    if not t >= 0:
        raise ValueError("t must be nonnegative")
    f0, joint = run_replicas(partial(_hyper_block, sampler, event_index, float(t)), cfg)
    lhs = mean_estimate(joint)
    p = mean_estimate(f0)
    h = 1.0 + math.tanh(min(t, T_INF) / 2.0)
    rhs_value = p.value**h
    rhs_se = h * p.value ** (h - 1.0) * p.se if p.value > 0 else 0.0
    return lhs, EstimateWithSE(rhs_value, rhs_se, p.n)
