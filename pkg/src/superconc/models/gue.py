"""GUE matrices and the quadratic-form field X_u = u* A u on the unit sphere.

The argmax of X is the top eigenvector; the overlap is |<u, v>|^2.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import NoConvergence
from ..field import FieldSampler

RQ_TOL = 1e-12
RESIDUAL_TOL = 1e-10
MAX_ITER = 100_000
POLISH_ITER = 50


def hermitian_from_disorder(z):
    """Hermitian matrices from real (..., n, n) standard normals.

    Diagonal a_ii = z_ii; for i < j, Re a_ij = z_ij / sqrt 2 and
    Im a_ij = z_ji / sqrt 2.
    """
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    iu = np.triu_indices(n, 1)
    a = np.zeros(z.shape, dtype=complex)
    zt = np.swapaxes(z, -1, -2)
    upper = (z[..., iu[0], iu[1]] + 1j * zt[..., iu[0], iu[1]]) / math.sqrt(2.0)
    a[..., iu[0], iu[1]] = upper
    a[..., iu[1], iu[0]] = np.conj(upper)
    d = np.arange(n)
    a[..., d, d] = z[..., d, d]
    return a


def gue_sample(n: int, rng) -> np.ndarray:
    if n < 2:
        raise ValueError("n must be at least 2")
    gen = rng.generator() if hasattr(rng, "generator") else rng
    return hermitian_from_disorder(gen.standard_normal((n, n)))


def _rayleigh(a, u):
    return float(np.real(np.vdot(u, a @ u)))


def gue_top_eigpair(a, shift=None):
    """Largest eigenvalue and a unit eigenvector by shifted power iteration.

    The shift 3 sqrt(n) makes B = A + shift I positive definite with high
    probability, so its dominant eigenvalue is the top one of A. To reach
    the tolerance in few passes when the spectral gap is small, B is first
    raised to a power 2^k by repeated squaring, then the iterate is polished
    by plain power steps until successive Rayleigh quotients agree. The
    budget counts 2^k plus every polish step taken.
    """
    a = np.asarray(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if shift is None:
        shift = 3.0 * math.sqrt(n)
    norm_a = float(np.linalg.norm(a))
    if norm_a == 0.0:
        u = np.zeros(n, dtype=complex)
        u[0] = 1.0
        return 0.0, u
    b = a + shift * np.eye(n)
    p = b / np.linalg.norm(b)
    power, polished = 1, 0
    prev = None
    lam = None
    u = None
    while power + polished < MAX_ITER:
        col = int(np.argmax(np.linalg.norm(p, axis=0)))
        u = p[:, col] / np.linalg.norm(p[:, col])
        for _ in range(POLISH_ITER):
            w = a @ u
            lam = float(np.real(np.vdot(u, w)))
            resid = float(np.linalg.norm(w - lam * u))
            if prev is not None and abs(lam - prev) < RQ_TOL * max(1.0, abs(lam)) \
                    and resid <= RESIDUAL_TOL * norm_a:
                return lam, u
            prev = lam
            v = b @ u
            u = v / np.linalg.norm(v)
        polished += POLISH_ITER
        power *= 2
        p = p @ p
        p /= np.linalg.norm(p)
    raise NoConvergence(f"top eigenpair not resolved within {MAX_ITER} iterations")


def gue_overlap(u, v) -> float:
    return float(abs(np.vdot(u, v)) ** 2)


class GUESampler(FieldSampler):
    """Locations are unit eigenvectors; the index set is a continuum."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("n must be at least 2")
        self.n = int(n)
        self.size = None
        self.log_size = None
        self.sigma_sq = 1.0
        self.disorder_shape = (self.n, self.n)
        self.label = f"gue:n={n}"

    def locate_max(self, z):
        a = hermitian_from_disorder(z)
        vecs = np.empty((z.shape[0], self.n), dtype=complex)
        vals = np.empty(z.shape[0])
        for r in range(z.shape[0]):
            vals[r], vecs[r] = gue_top_eigpair(a[r])
        return vecs, vals

    def value_at(self, z, loc):
        a = hermitian_from_disorder(z)
        return np.real(np.einsum("bi,bij,bj->b", np.conj(loc), a, loc))

    def overlap(self, a, b):
        return np.abs(np.einsum("bi,bi->b", np.conj(a), b)) ** 2

    def loc_equal(self, a, b):
        return np.isclose(self.overlap(a, b), 1.0, atol=1e-12)
