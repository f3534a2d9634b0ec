import math

import numpy as np
import pytest

from superconc.errors import TooLarge
from superconc.models.counterexamples import CEFieldA, CEFieldB, ce_a_sample, ce_b_sample
from superconc.rng import RngStream


def test_ce_b_two():
    rng = RngStream(0, 5)
    g = rng.generator().standard_normal((2, 2))
    s = ce_b_sample(2, rng)
    assert s.M == pytest.approx((max(g[0]) + max(g[1])) / math.sqrt(2))
    assert list(s.fstar) == [int(np.argmax(g[0])), int(np.argmax(g[1]))]


def test_ce_b_max_beats_every_map_small_n():
    n = 4
    f = CEFieldB(n)
    z = np.random.default_rng(2).standard_normal((1, n, n))
    loc, m = f.locate_max(z)
    import itertools
    best = max(sum(z[0, i, fi] for i, fi in enumerate(fm)) / 2.0
               for fm in itertools.product(range(n), repeat=n))
    assert m[0] == pytest.approx(best)
    assert f.value_at(z, loc)[0] == pytest.approx(best)


def test_ce_b_overlap():
    f = CEFieldB(4)
    assert f.overlap(np.array([[0, 1, 2, 3]]), np.array([[0, 1, 0, 0]]))[0] == 0.5


def test_ce_a_first_block_formula():
    n = 6
    rng = RngStream(1, 2)
    z = rng.generator().standard_normal((n, 2 * n + 1))
    s = ce_a_sample(n, rng)
    assert s.block_max[0] == pytest.approx(np.maximum(z[0, :n], z[0, n:2 * n]).sum() / math.sqrt(n))


def test_ce_a_closed_form_max_matches_enumeration():
    f = CEFieldA(7)
    z = np.random.default_rng(3).standard_normal((4,) + f.disorder_shape)
    x = f.field(z)
    loc, m = f.locate_max(z)
    assert np.allclose(m, x.max(1))
    assert np.array_equal(loc, x.argmax(1))
    assert np.allclose(f.value_at(z, loc), m)


def test_ce_a_kernel_properties():
    f = CEFieldA(4)
    k = f.kernel.matrix()
    assert np.allclose(np.diag(k), 1.0)
    assert k.min() >= 0
    assert np.allclose(k, k.T)


def test_ce_a_sampler_matches_kernel():
    from helpers import assert_sampler_matches_kernel

    assert_sampler_matches_kernel(CEFieldA(3), seed=4)


def test_ce_a_too_large():
    with pytest.raises(TooLarge):
        CEFieldA(21)
    with pytest.raises(TooLarge):
        CEFieldB(10_001)
