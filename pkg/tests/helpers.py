import math

import numpy as np
from scipy import stats

from superconc.montecarlo import MCConfig, run_replicas


def draw_fields(sampler, n, seed=0):
    def block(b):
        (z,) = b.draw(("normal", sampler.disorder_shape))
        return sampler.field(z)

    return run_replicas(block, MCConfig(n_samples=n, master_seed=seed))


def covariance_max_z(x, kernel_matrix):
    """Largest |z| of sample second moments against a known covariance."""
    n = x.shape[0]
    second = x.T @ x / n
    var = (np.outer(np.diag(kernel_matrix), np.diag(kernel_matrix)) + kernel_matrix**2) / n
    return float(np.max(np.abs(second - kernel_matrix) / np.sqrt(var)))


def bonferroni_z(m, level=1e-3):
    """Two-sided normal quantile for m simultaneous comparisons."""
    return float(stats.norm.isf(level / (2 * m)))


def assert_sampler_matches_kernel(sampler, n=20_000, seed=0):
    x = draw_fields(sampler, n, seed)
    k = sampler.kernel.matrix()
    m = k.shape[0] * (k.shape[0] + 1) // 2
    assert covariance_max_z(x, k) <= max(3.0, bonferroni_z(m))
    assert np.max(np.abs(x.mean(0)) / np.sqrt(np.diag(k) / n)) <= max(3.0, bonferroni_z(k.shape[0]))


def within_k_se(value, target, se, k=3.0):
    return abs(value - target) <= k * se + 1e-15 * math.fabs(target)


def dense_torus_solve(n):
    q = n**-2.0
    p = np.zeros((n * n, n * n))
    for r in range(n):
        for c in range(n):
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                p[r * n + c, ((r + dr) % n) * n + (c + dc) % n] += 0.25
    return np.linalg.solve(np.eye(n * n) - (1 - q) * p, np.eye(n * n))


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def report(number, title, passed, detail):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed
