"""Discrete Gaussian free field on an n x n grid.

Zero boundary: the index set is the (n-2)^2 interior sites in row-major
order and Cov = (I - Q)^{-1}, with Q the walk's transition matrix restricted
to the interior. Torus: Cov = (I - (1-q)P)^{-1} with q = n^{-2}, where P is
the nearest-neighbour walk on (Z/n)^2; it is diagonal in the Fourier basis.
"""
from __future__ import annotations

import math
from functools import partial

import numpy as np

from ..errors import TooLarge, TooSmall
from ..field import CovarianceKernel, DenseSampler, FieldSampler

DENSE_MAX_N = 64
TORUS_MAX_N = 1024


def _check(n, boundary):
    if boundary not in ("zero", "torus"):
        raise ValueError(f"unknown boundary {boundary!r}")
    if n < 3:
        raise TooSmall(f"grid side n={n} is below 3")
    limit = DENSE_MAX_N if boundary == "zero" else TORUS_MAX_N
    if n > limit:
        raise TooLarge(f"grid side n={n} exceeds {limit} for boundary={boundary}")


def interior_walk(n: int) -> np.ndarray:
    """Q: simple random walk on the grid, killed on leaving the interior."""
    m = n - 2
    q = np.zeros((m * m, m * m))
    for r in range(m):
        for c in range(m):
            i = r * m + c
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < m and 0 <= cc < m:
                    q[i, rr * m + cc] = 0.25
    return q


def torus_walk(n: int) -> np.ndarray:
    p = np.zeros((n * n, n * n))
    for r in range(n):
        for c in range(n):
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                p[r * n + c, ((r + dr) % n) * n + (c + dc) % n] += 0.25
    return p


def torus_spectrum(n: int) -> np.ndarray:
    """Eigenvalues of (I - (1-q)P)^{-1} on the Fourier modes (j, k)."""
    q = n ** -2.0
    c = np.cos(2 * np.pi * np.arange(n) / n)
    lam = 0.5 * (c[:, None] + c[None, :])
    return 1.0 / (1.0 - (1.0 - q) * lam)


def torus_displacement_cov(n: int) -> np.ndarray:
    """c[a, b] = Cov(phi_x, phi_{x + (a, b)})."""
    return np.real(np.fft.ifft2(torus_spectrum(n)))


def dgff_covariance(n: int, boundary: str = "zero") -> CovarianceKernel:
    _check(n, boundary)
    if boundary == "zero":
        m = (n - 2) ** 2
        return CovarianceKernel.dense(np.linalg.inv(np.eye(m) - interior_walk(n)))
    c = torus_displacement_cov(n)
    c.setflags(write=False)
    return CovarianceKernel.implicit(partial(_toric_cov, c, n), n * n, float(c[0, 0]))


def _toric_cov(c, n, i, j):
    dr = (j // n - i // n) % n
    dc = (j % n - i % n) % n
    return c[dr, dc]


def dgff_sampler(n: int, boundary: str = "zero") -> FieldSampler:
    if boundary == "zero":
        _check(n, boundary)
        s = DenseSampler(dgff_covariance(n, "zero"), label=f"dgff:n={n},boundary=zero")
        s.n = n
        return s
    return TorusDGFF(n)


class TorusDGFF(FieldSampler):
    """phi = Re ifft2(sqrt(s) * fft2(z)): exact for the circulant covariance."""

    backend = "spectral-fft"
    enumerable = True

    def __init__(self, n: int):
        _check(n, "torus")
        self.n = int(n)
        self.size = n * n
        self.log_size = 2 * math.log(n)
        self.kernel = dgff_covariance(n, "torus")
        self.sigma_sq = self.kernel.sigma_sq
        self.disorder_shape = (n, n)
        self.root = np.sqrt(torus_spectrum(n))
        self.root.setflags(write=False)
        self.label = f"dgff:n={n},boundary=torus"

    def field(self, z):
        phi = np.real(np.fft.ifft2(self.root * np.fft.fft2(z)))
        return phi.reshape(z.shape[0], self.size)
