import numpy as np
import pytest

from helpers import assert_sampler_matches_kernel, dense_torus_solve
from superconc.errors import TooLarge, TooSmall
from superconc.models.dgff import TorusDGFF, dgff_covariance, dgff_sampler


def test_n3_zero_boundary():
    assert np.array_equal(dgff_covariance(3, "zero").matrix(), [[1.0]])


def test_zero_boundary_visit_counts_n4():
    # interior is a 2x2 block; each site has two interior neighbours
    q = np.array([[0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]]) / 4
    assert np.allclose(dgff_covariance(4).matrix(), np.linalg.inv(np.eye(4) - q))


@pytest.mark.parametrize("n", [3, 8, 16, 32])
def test_torus_row_sums(n):
    k = dgff_covariance(n, "torus")
    rows = k.matrix().sum(axis=1)
    assert np.allclose(rows, n * n, rtol=1e-8, atol=0)


def test_torus_fourier_matches_dense():
    got = dgff_covariance(8, "torus").matrix()
    assert np.max(np.abs(got - dense_torus_solve(8))) <= 1e-8


def test_torus_translation_invariance():
    n = 12
    k = dgff_covariance(n, "torus")
    full = dense_torus_solve(n)
    g = np.random.default_rng(0)
    for _ in range(100):
        x, y, s = g.integers(0, n * n, 3)
        sx = ((x // n + s // n) % n) * n + (x % n + s % n) % n
        sy = ((y // n + s // n) % n) * n + (y % n + s % n) % n
        assert k.eval(x, y) == k.eval(sx, sy)
        assert k.eval(x, y) == pytest.approx(full[x, y], abs=1e-9)


def test_nonnegative_covariances():
    assert dgff_covariance(10).matrix().min() >= 0
    assert dgff_covariance(10, "torus").matrix().min() >= 0


def test_size_errors():
    with pytest.raises(TooSmall):
        dgff_covariance(2)
    with pytest.raises(TooLarge):
        dgff_covariance(65, "zero")


def test_zero_boundary_sampler():
    s = dgff_sampler(6, "zero")
    assert s.size == 16
    assert_sampler_matches_kernel(s, seed=1)


def test_torus_fft_sampler():
    s = TorusDGFF(6)
    assert s.backend == "spectral-fft"
    assert_sampler_matches_kernel(s, seed=2)
