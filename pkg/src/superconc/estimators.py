"""Monte Carlo estimators and statistical checks built on the replica engine.

All checks use 3-standard-error margins unless noted. Each estimator draws
its own replicas from ``cfg.master_seed``; results depend only on the seed,
the replica count and the sampler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .bounds import b_borell_tail, b_varconv_lower, b_varconv_upper
from .errors import KernelOrderViolated
from .field import T_INF, FieldSampler, _ou
from .montecarlo import (
    EstimateWithSE,
    MCConfig,
    block_size_for,
    combined_se,
    mean_estimate,
    proportion_estimate,
    run_replicas,
    variance_estimate,
)

K_SE = 3.0
MONOTONE_K_SE = 2.0


def _run(sampler, fn, cfg, n_samples=None):
    return run_replicas(fn, cfg, n_samples, block_size=block_size_for(sampler.footprint))


def _max_block(sampler, block):
    (z0,) = block.draw(("normal", sampler.disorder_shape))
    return sampler.locate_max(z0)[1]


def _coupled_block(sampler, ts, tau, block):
    """M^0 plus, for each t in ts (and optionally t = tau), the overlap and M^t."""
    d = sampler.disorder_shape
    pieces = [("normal", d), ("normal", d)] + ([("uniform", ())] if tau else [])
    drawn = block.draw(*pieces)
    z0, z1 = drawn[0], drawn[1]
    loc0, m0 = sampler.locate_max(z0)
    cols = []
    times = [np.full(len(block), t) for t in ts]
    if tau:
        times.append(-np.log(drawn[2]))
    for t in times:
        if np.all(t == 0):
            cols.append(sampler.overlap(loc0, loc0))
            continue
        loct, _ = sampler.locate_max(_ou(z0, z1, t))
        cols.append(sampler.overlap(loc0, loct))
    overlaps = np.stack(cols, axis=1) if cols else np.empty((len(block), 0))
    return m0, overlaps


def estimate_max_stats(sampler: FieldSampler, cfg: MCConfig):
    """(m_hat, v_hat): mean and unbiased variance of M = max X."""
    m = _run(sampler, partial(_max_block, sampler), cfg)
    return mean_estimate(m), variance_estimate(m)


@dataclass
class OverlapCurve:
    points: list  # (t, EstimateWithSE)

    @property
    def ts(self):
        return [t for t, _ in self.points]

    def values(self):
        return np.array([e.value for _, e in self.points])


def estimate_overlap_curve(sampler: FieldSampler, cfg: MCConfig, with_max=False):
    """E R(I^0, I^t) on cfg.t_grid, with one X' per replica shared by all t."""
    if not cfg.t_grid:
        raise ValueError("t_grid is empty")
    m0, ov = _run(sampler, partial(_coupled_block, sampler, cfg.t_grid, False), cfg)
    curve = OverlapCurve([(t, mean_estimate(ov[:, k])) for k, t in enumerate(cfg.t_grid)])
    if with_max:
        return curve, mean_estimate(m0), variance_estimate(m0)
    return curve


@dataclass
class IdentityReport:
    v_hat: EstimateWithSE
    overlap_tau: EstimateWithSE
    z: float
    passed: bool


def check_identity(sampler: FieldSampler, cfg: MCConfig) -> IdentityReport:
    """Compare Var(M) with E R(I^0, I^tau), tau ~ Exp(1), on shared replicas."""
    m0, ov = _run(sampler, partial(_coupled_block, sampler, (), True), cfg)
    v = variance_estimate(m0)
    r = mean_estimate(ov[:, 0])
    se = combined_se(v.se, r.se)
    z = 0.0 if se == 0 else (v.value - r.value) / se
    if se == 0 and v.value != r.value:
        z = math.copysign(math.inf, v.value - r.value)
    return IdentityReport(v, r, z, abs(z) <= K_SE)


@dataclass
class TauberianRow:
    t: float
    overlap: EstimateWithSE
    upper: float  # v / (1 - e^{-t}), nan at t = 0
    lower: float  # sigma^2 (1 - e^{-t}) + E R e^{-t}
    upper_ok: bool
    lower_ok: bool
    monotone_ok: bool

    @property
    def passed(self):
        return self.upper_ok and self.lower_ok and self.monotone_ok


@dataclass
class TauberianReport:
    rows: list
    v_hat: EstimateWithSE
    sigma_sq: float

    @property
    def passed(self):
        return all(r.passed for r in self.rows)


def check_tauberian(curve: OverlapCurve, v_hat: EstimateWithSE, sigma_sq: float):
    """Fixed-t sandwich around Var(M) plus monotone decrease of the curve."""
    rows = []
    prev = None
    v, sv = v_hat.value, v_hat.se
    for t, e in curve.points:
        tt = min(t, T_INF)
        decay = math.exp(-tt)
        if t > 0:
            upper = b_varconv_upper(v, t)
            se_up = combined_se(e.se, sv / -math.expm1(-tt))
            upper_ok = e.value <= upper + K_SE * se_up
        else:
            upper, upper_ok = math.nan, True
        lower = b_varconv_lower(sigma_sq, e.value, t)
        lower_ok = v <= lower + K_SE * combined_se(sv, decay * e.se)
        mono = prev is None or e.value <= prev.value + MONOTONE_K_SE * combined_se(e.se, prev.se)
        rows.append(TauberianRow(t, e, upper, lower, upper_ok, lower_ok, mono))
        prev = e
    return TauberianReport(rows, v_hat, sigma_sq)


@dataclass
class PeaksReport:
    A: list
    l: int
    eps: float
    delta: float
    pairwise_max_R: float
    min_value_gap: float  # min_{i in A} X_i - (M - delta), >= 0
    success: bool


def _kernel_eval(kernel, i, j):
    if hasattr(kernel, "eval"):
        return np.asarray(kernel.eval(i, j), dtype=float)
    return np.asarray(kernel[i, j], dtype=float)


def find_peaks(x, kernel, eps: float, delta: float, l: int | None = None) -> PeaksReport:
    """Greedy set of near-maximal, pairwise weakly correlated sites.

    Scans {i : x_i >= M - delta} in decreasing x order and admits i when
    R(i, j) < eps for every admitted j. With ``l`` given the scan stops
    once l sites are admitted and success means exactly l were found.
    ``kernel`` is a CovarianceKernel or a square array.
    """
    if not eps > 0 or not delta >= 0:
        raise ValueError("eps must be positive and delta nonnegative")
    x = np.asarray(x, dtype=float)
    top = float(x.max())
    thresh = top - delta
    cand = np.flatnonzero(x >= thresh)
    cand = cand[np.argsort(-x[cand], kind="stable")]
    alive = np.ones(cand.size, dtype=bool)
    admitted = []
    for pos in range(cand.size):
        if not alive[pos]:
            continue
        i = int(cand[pos])
        admitted.append(i)
        if l is not None and len(admitted) >= l:
            break
        rest = cand[pos + 1 :]
        if rest.size:
            alive[pos + 1 :] &= _kernel_eval(kernel, i, rest) < eps
    a = np.array(admitted)
    if a.size > 1:
        r = _kernel_eval(kernel, a[:, None], a[None, :]).copy()
        np.fill_diagonal(r, -np.inf)
        pmax = float(r.max())
    else:
        pmax = -math.inf
    gap = float(x[a].min() - thresh)
    success = True if l is None else len(admitted) == l
    return PeaksReport(admitted, len(admitted), eps, delta, pmax, gap, success)


def _peaks_block(sampler, eps, delta, l, block):
    (z,) = block.draw(("normal", sampler.disorder_shape))
    x = sampler.field(z)
    out = np.empty(len(block))
    for r in range(len(block)):
        out[r] = find_peaks(x[r], sampler.kernel, eps, delta, l).l
    return out


def peaks_frequency(sampler: FieldSampler, cfg: MCConfig, eps, delta, l):
    """Fraction of replicas in which the greedy search admits l sites.

    With ``l=None`` the search is uncapped and the frequency is that of at
    least two peaks.
    """
    counts = _run(sampler, partial(_peaks_block, sampler, eps, delta, l), cfg)
    return proportion_estimate(counts >= (2 if l is None else l)), counts


@dataclass
class TailReport:
    r_grid: list
    m_hat: EstimateWithSE
    sigma_sq: float
    upper: list = field(default_factory=list)  # EstimateWithSE of P(M - m >= r)
    lower: list = field(default_factory=list)  # EstimateWithSE of P(m - M >= r)
    borell_bound: list = field(default_factory=list)

    @property
    def passes(self):
        return [
            u.value <= b + K_SE * u.se and w.value <= b + K_SE * w.se
            for u, w, b in zip(self.upper, self.lower, self.borell_bound)
        ]

    @property
    def passed(self):
        return all(self.passes)


def tail_profile(sampler: FieldSampler, cfg: MCConfig, r_grid) -> TailReport:
    r_grid = [float(r) for r in r_grid]
    if any(r < 0 for r in r_grid):
        raise ValueError("r_grid must be nonnegative")
    m = _run(sampler, partial(_max_block, sampler), cfg)
    mh = mean_estimate(m)
    rep = TailReport(r_grid, mh, sampler.sigma_sq)
    for r in r_grid:
        rep.upper.append(proportion_estimate(m - mh.value >= r))
        rep.lower.append(proportion_estimate(mh.value - m >= r))
        rep.borell_bound.append(b_borell_tail(sampler.sigma_sq, r))
    return rep


def _prediction_block(sampler, t, block):
    d = sampler.disorder_shape
    z0, z1 = block.draw(("normal", d), ("normal", d))
    _, m0 = sampler.locate_max(z0)
    if t == 0:
        return m0, m0
    loct, _ = sampler.locate_max(_ou(z0, z1, t))
    return m0, sampler.value_at(z0, loct)


@dataclass
class PredictionReport:
    t: float
    x_grid: list
    m_hat: EstimateWithSE
    freq: list
    bound: list

    @property
    def passes(self):
        return [f.value <= b + K_SE * f.se for f, b in zip(self.freq, self.bound)]

    @property
    def passed(self):
        return all(self.passes)


def prediction_check(sampler: FieldSampler, cfg: MCConfig, t: float, x_grid=(1.0, 2.0, 3.0)):
    """How well the perturbed argmax predicts the original field's level.

    Frequency of |X_{I^t} - e^{-t} m_hat| >= x against 4 exp(-x^2 / 4 sigma^2),
    with m_hat estimated from the same replicas.
    """
    if not t >= 0:
        raise ValueError("t must be nonnegative")
    m0, xit = _run(sampler, partial(_prediction_block, sampler, float(t)), cfg)
    mh = mean_estimate(m0)
    dev = np.abs(xit - math.exp(-min(t, T_INF)) * mh.value)
    s2 = sampler.sigma_sq
    freq = [proportion_estimate(dev >= x) for x in x_grid]
    bound = [4.0 * math.exp(-x * x / (4.0 * s2)) for x in x_grid]
    return PredictionReport(float(t), list(x_grid), mh, freq, bound)


SLEPIAN_DENSE_LIMIT = 4096
SLEPIAN_SPOT_PAIRS = 2000


def check_kernel_order(kx, ky, size, seed=0, tol=1e-12):
    """Raise KernelOrderViolated unless R_X(i,i) = R_Y(i,i) and R_X >= R_Y.

    Full comparison for index sets up to 4096 sites, otherwise a random
    spot-check of pairs plus the full diagonal when affordable.
    """
    if size <= SLEPIAN_DENSE_LIMIT:
        a, b = kx.matrix(), ky.matrix()
        if np.max(np.abs(np.diag(a) - np.diag(b))) > tol:
            raise KernelOrderViolated("variances differ")
        if np.min(a - b) < -tol:
            i, j = np.unravel_index(np.argmin(a - b), a.shape)
            raise KernelOrderViolated(f"R_X({i},{j}) < R_Y({i},{j})")
        return
    rng = np.random.default_rng(seed)
    i = rng.integers(0, size, SLEPIAN_SPOT_PAIRS)
    j = rng.integers(0, size, SLEPIAN_SPOT_PAIRS)
    if np.max(np.abs(kx.eval(i, i) - ky.eval(i, i))) > tol:
        raise KernelOrderViolated("variances differ")
    if np.min(kx.eval(i, j) - ky.eval(i, j)) < -tol:
        raise KernelOrderViolated("R_X < R_Y at a sampled pair")


@dataclass
class SlepianReport:
    m_x: EstimateWithSE
    m_y: EstimateWithSE
    passed: bool


def slepian_check(sampler_x: FieldSampler, sampler_y: FieldSampler, cfg: MCConfig):
    """E max X <= E max Y when X is the more correlated field."""
    if sampler_x.size != sampler_y.size:
        raise ValueError("index sets differ in size")
    if sampler_x.kernel is not None and sampler_y.kernel is not None:
        check_kernel_order(sampler_x.kernel, sampler_y.kernel, sampler_x.size)
    mx, _ = estimate_max_stats(sampler_x, cfg)
    my, _ = estimate_max_stats(sampler_y, cfg)
    ok = mx.value <= my.value + K_SE * combined_se(mx.se, my.se)
    return SlepianReport(mx, my, ok)


@dataclass
class ScalingRow:
    n: int
    m_hat: EstimateWithSE
    v_hat: EstimateWithSE
    sigma_sq: float
    log_size: float
    overlaps: list  # (t, EstimateWithSE)

    @property
    def v_ratio(self):
        return self.v_hat.value / self.sigma_sq

    @property
    def alpha(self):
        if not self.log_size:
            return math.nan
        return self.m_hat.value / math.sqrt(2.0 * self.sigma_sq * self.log_size)


_SIZE_KEY = {"nk": "N"}


def family_builder(model_family):
    """Turn ``"polymer"``, ``"sk:xi=x^2"`` or ``"nk:K=4,N={n}"`` into n -> sampler."""
    if callable(model_family):
        return model_family
    from .models import parse_model_spec

    text = str(model_family)
    if "{n}" in text:
        return lambda n: parse_model_spec(text.format(n=n))
    fam, _, rest = text.partition(":")
    key = _SIZE_KEY.get(fam, "n")
    return lambda n: parse_model_spec(f"{fam}:{key}={n}" + (f",{rest}" if rest else ""))


def scaling_sweep(model_family, n_list, cfg: MCConfig):
    """Per-n max statistics and (if cfg.t_grid) overlap points."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    build = family_builder(model_family)
    rows = []
    for n in n_list:
        s = build(n)
        if cfg.t_grid:
            curve, m, v = estimate_overlap_curve(s, cfg, with_max=True)
            pts = curve.points
        else:
            m, v = estimate_max_stats(s, cfg)
            pts = []
        rows.append(ScalingRow(n, m, v, s.sigma_sq, s.log_size, pts))
    return rows
