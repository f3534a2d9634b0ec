"""Closed-form bounds on the maximum of a Gaussian field.

Bounds stated with an unspecified universal constant are evaluated with the
constant set to 1 and reported with ``constant_free=False``; they are only
good for comparing trends, never as strict inequalities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivideByZero, DomainError, InvalidRange, NonpositiveX, TooSmall
from .series import SeriesCoeffs, XiSpec, critical_xi, cstar_coeffs  # noqa: F401

SQRT_2PI = math.sqrt(2.0 * math.pi)
T_INF = 50.0
HYPER2_POINTS = 10_000


@dataclass(frozen=True)
class BoundReport:
    name: str
    structural_value: float
    constant_free: bool
    inputs: dict = field(default_factory=dict)
    vacuous: bool = False

    def as_dict(self):
        return {
            "name": self.name,
            "value": self.structural_value,
            "constant_free": self.constant_free,
            "vacuous": self.vacuous,
            "inputs": dict(self.inputs),
        }


def b_max_mean(sigma_sq, S_size):
    """sqrt(2 sigma^2 log|S|), a ceiling for E max X."""
    if S_size < 1:
        raise ValueError("S_size must be at least 1")
    return math.sqrt(2.0 * sigma_sq * math.log(S_size))


def b_borell_tail(sigma_sq, r):
    """exp(-r^2 / 2 sigma^2), bounding each tail of M about its mean."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return math.exp(-r * r / (2.0 * sigma_sq))


def b_varconv_upper(v, t):
    """v / (1 - e^{-t}) bounds E R(I^0, I^t) from above."""
    if t == 0:
        raise DivideByZero("upper bound is infinite at t = 0")
    if t < 0:
        raise ValueError("t must be nonnegative")
    return v / -math.expm1(-min(t, T_INF))


def b_varconv_lower(sigma_sq, overlap, t):
    """sigma^2 (1 - e^{-t}) + E R(I^0, I^t) e^{-t}, an upper bound for v."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    t = min(t, T_INF)
    return -sigma_sq * math.expm1(-t) + overlap * math.exp(-t)


def b_gencorr(r_list, S_size):
    """beta from the covariance profile; v <= C sigma^2 beta (C unknown)."""
    if S_size < 3:
        raise TooSmall("need |S| >= 3 so that log log |S| > 0")
    r = np.asarray(r_list, dtype=float).ravel()
    if r.size != S_size * S_size:
        raise ValueError(f"expected {S_size * S_size} covariances, got {r.size}")
    if np.any(r < -1 - 1e-12) or np.any(r > 1 + 1e-12):
        raise ValueError("correlations must lie in [-1, 1]")
    log_s = math.log(S_size)
    one_plus = 1.0 + r
    safe = np.where(one_plus > 0, one_plus, 1.0)
    terms = np.where(one_plus > 0, np.exp(-2.0 * log_s / safe), 0.0)
    inner = math.fsum(terms)
    return ((math.log(log_s) + math.log(inner)) / log_s) ** 0.25


def b_extreme(m, sigma_sq, S_size):
    """(alpha, beta): how close m is to the i.i.d. ceiling, and the
    resulting variance factor (structural)."""
    if S_size < 3:
        raise TooSmall("need |S| >= 3")
    log_s = math.log(S_size)
    alpha = min(max(m / math.sqrt(2.0 * sigma_sq * log_s), 0.0), 1.0)
    beta = math.sqrt(1.0 - alpha) + (math.log(log_s) / log_s) ** 0.25
    return alpha, beta


def b_corrbd(sigma_sq, rho, S_size):
    """sigma^2 / log|S| + rho with the constant set to 1 (structural)."""
    if S_size < 2:
        raise ValueError("S_size must be at least 2")
    return sigma_sq / math.log(S_size) + rho


def _one_minus_over_neglog(rho):
    """(1 - rho) / (-log rho), equal to 1 at rho = 1."""
    lg = np.log(rho)
    out = np.ones_like(lg)
    nz = lg != 0
    out[nz] = np.expm1(lg[nz]) / lg[nz]
    return out


def b_hyper2(rho_fn, mu_fn, sigma_sq, quadrature_points=HYPER2_POINTS):
    """Trapezoid rule for int_0^{sigma^2} 2 mu(r) (1 - rho(r)) / (-log rho(r)) dr."""
    if quadrature_points < 2:
        raise ValueError("need at least two quadrature points")
    r = np.linspace(0.0, sigma_sq, quadrature_points)
    rho = np.broadcast_to(np.asarray(rho_fn(r), dtype=float), r.shape)
    if np.any(~(rho > 0)) or np.any(rho > 1):
        raise InvalidRange("rho must take values in (0, 1]")
    mu = np.broadcast_to(np.asarray(mu_fn(r), dtype=float), r.shape)
    f = 2.0 * mu * _one_minus_over_neglog(rho)
    h = r[1] - r[0]
    return float(h * (f.sum() - 0.5 * (f[0] + f[-1])))


def mills_bounds(x):
    """Lower and upper bounds for the standard normal tail at x > 0."""
    if not x > 0:
        raise NonpositiveX("Mills bounds need x > 0")
    phi = math.exp(-x * x / 2.0) / SQRT_2PI
    return x * phi / (1.0 + x * x), phi / x


def gausstail(x):
    """exp(-x^2 / 2) >= P(Z >= x) for x >= 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    return math.exp(-x * x / 2.0)


def b_p2p3_probability(v, m, sigma_sq, l, eps, delta):
    """Lower bound on the probability of l near-maximal, weakly correlated
    sites; negative values are vacuous."""
    if not (l >= 2 and 0 < eps < sigma_sq and 0 < delta < m and v >= 0):
        raise DomainError("need l >= 2, 0 < eps < sigma^2, 0 < delta < m, v >= 0")
    ll = l * math.log(l)
    a = 4.0 * math.sqrt(v * m * l * l * ll / (delta * eps))
    b = 4.0 * (v * sigma_sq**2 * l**4 * ll / (delta**3 * m * eps)) ** 0.25
    return 1.0 - a - b


def p2p3_report(v, m, sigma_sq, l, eps, delta) -> BoundReport:
    p = b_p2p3_probability(v, m, sigma_sq, l, eps, delta)
    inputs = dict(v=v, m=m, sigma_sq=sigma_sq, l=l, eps=eps, delta=delta)
    return BoundReport("p2p3_probability", p, True, inputs, vacuous=p <= 0)


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    first_violation: object = None
    detail: str = ""


def check_majorization(c: XiSpec, cstar: SeriesCoeffs) -> CheckResult:
    """Partial sums sum_{p<=r} c_p <= sum_{p<=r} c_p* for r = 2..P.

    P is the order of ``cstar``; weights of ``c`` beyond P are not seen.
    """
    order = cstar.order
    cc = np.zeros(order + 1)
    k = min(order + 1, c.coeffs.size)
    cc[:k] = c.coeffs[:k]
    lhs = np.cumsum(cc)
    rhs = np.cumsum(cstar.cstar)
    tol = 1e-12
    for r in range(2, order + 1):
        if lhs[r] > rhs[r] + tol:
            return CheckResult(False, r, f"partial sum {lhs[r]:.6g} > {rhs[r]:.6g}")
    return CheckResult(True)


def check_xi_condition(xi, x_grid) -> CheckResult:
    """|xi(x)| <= xi(|x|) and xi(x) <= I(x) / (2 log 2 - I(x)) on the grid."""
    x = np.asarray(x_grid, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise ValueError("grid must lie in (-1, 1)")
    val = np.asarray(xi(x), dtype=float)
    sym = np.asarray(xi(np.abs(x)), dtype=float)
    f = critical_xi(x)
    tol = 1e-12 * np.maximum(1.0, np.abs(f))
    bad1 = np.abs(val) > sym + tol
    if bad1.any():
        return CheckResult(False, float(x[np.argmax(bad1)]), "|xi(x)| > xi(|x|)")
    bad2 = val > f + tol
    if bad2.any():
        return CheckResult(False, float(x[np.argmax(bad2)]), "xi(x) above the critical mixture")
    return CheckResult(True)
