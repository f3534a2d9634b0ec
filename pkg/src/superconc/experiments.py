"""Dispatch from an ExperimentConfig to the estimators and calculators."""
from __future__ import annotations

import datetime
import math
import time

import numpy as np

from . import estimators as est
from .bounds import check_majorization, check_xi_condition
from .config import ExperimentConfig
from .models import parse_model_spec
from .montecarlo import MCConfig
from .results import ResultRecord
from .series import cstar_coeffs, parse_xi

XI_GRID = np.linspace(-0.99, 0.99, 99)


def _run_identity(cfg, rec, mc):
    s = parse_model_spec(cfg.model_spec)
    r = est.check_identity(s, mc)
    rec.add("v_hat", r.v_hat.value, r.v_hat.se)
    rec.add("overlap_tau", r.overlap_tau.value, r.overlap_tau.se)
    rec.add("z", r.z, None, est.K_SE, r.passed)


def _run_overlap(cfg, rec, mc):
    s = parse_model_spec(cfg.model_spec)
    curve, m, v = est.estimate_overlap_curve(s, mc, with_max=True)
    rep = est.check_tauberian(curve, v, s.sigma_sq)
    rec.add("v_hat", v.value, v.se)
    rows = []
    for row in rep.rows:
        up = row.upper if row.t > 0 else None
        rec.add(f"overlap:t={row.t!r}", row.overlap.value, row.overlap.se, up, row.upper_ok)
        rec.add(f"varconv_lower:t={row.t!r}", v.value, v.se, row.lower, row.lower_ok)
        rec.add(f"monotone:t={row.t!r}", row.overlap.value, row.overlap.se, None, row.monotone_ok)
        rows.append((row.t, row.overlap.value, row.overlap.se, row.upper))
    rec.series["overlap_curve"] = (("t", "value", "se", "varconv_upper"), rows)


def _run_variance(cfg, rec, mc):
    s = parse_model_spec(cfg.model_spec)
    m, v = est.estimate_max_stats(s, mc)
    if s.log_size is not None:
        ceiling = math.sqrt(2.0 * s.sigma_sq * s.log_size)
        rec.add("m_hat", m.value, m.se, ceiling, m.value <= ceiling + est.K_SE * m.se)
    else:
        rec.add("m_hat", m.value, m.se)
    rec.add("v_hat", v.value, v.se, s.sigma_sq, v.value <= s.sigma_sq + est.K_SE * v.se)


def _run_peaks(cfg, rec, mc):
    s = parse_model_spec(cfg.model_spec)
    eps, delta, l = cfg.get("eps"), cfg.get("delta"), cfg.get("l")
    freq, counts = est.peaks_frequency(s, mc, eps, delta, l)
    se = float(np.std(counts, ddof=1) / math.sqrt(counts.size))
    rec.add("mean_peaks", float(np.mean(counts)), se)
    if l is not None:
        need = cfg.get("min_freq", 0.9)
        rec.add(f"success_frequency:l={l}", freq.value, freq.se, need, freq.value >= need)


def _run_tails(cfg, rec, mc):
    s = parse_model_spec(cfg.model_spec)
    rep = est.tail_profile(s, mc, cfg.get("r_grid"))
    rec.add("m_hat", rep.m_hat.value, rep.m_hat.se)
    rows = []
    for r, u, w, b in zip(rep.r_grid, rep.upper, rep.lower, rep.borell_bound):
        rec.add(f"upper_tail:r={r!r}", u.value, u.se, b, u.value <= b + est.K_SE * u.se)
        rec.add(f"lower_tail:r={r!r}", w.value, w.se, b, w.value <= b + est.K_SE * w.se)
        rows.append((r, u.value, u.se, w.value, w.se, b))
    rec.series["tails"] = (("r", "upper", "upper_se", "lower", "lower_se", "borell"), rows)


def _run_bounds(cfg, rec, mc):
    xi = parse_xi(cfg.get("xi", "x^2"))
    order = cfg.get("order", 64)
    cs = cstar_coeffs(order)
    rec.add("c2_star", float(cs.cstar[2]), None, 1.0 / (4.0 * math.log(2.0)))
    rec.add(f"cstar_partial_sum:P={order}", float(cs.cstar.sum()), None, 1.0,
            bool(cs.cstar.sum() <= 1.0))
    maj = check_majorization(xi, cs)
    rec.add("majorization_first_violation", maj.first_violation or 0, None, None, maj.passed)
    cond = check_xi_condition(xi, XI_GRID)
    rec.add("xi_condition_first_violation",
            cond.first_violation if cond.first_violation is not None else math.nan,
            None, None, cond.passed)
    rec.notes["xi"] = str(xi)


def _run_scaling(cfg, rec, mc):
    rows_out = []
    for row in est.scaling_sweep(cfg.model_spec, cfg.get("n_list"), mc):
        n = row.n
        rec.add(f"m_hat:n={n}", row.m_hat.value, row.m_hat.se)
        rec.add(f"v_hat:n={n}", row.v_hat.value, row.v_hat.se, row.sigma_sq,
                row.v_hat.value <= row.sigma_sq + est.K_SE * row.v_hat.se)
        rec.add(f"v_ratio:n={n}", row.v_ratio, row.v_hat.se / row.sigma_sq)
        if row.log_size:
            rec.add(f"alpha_hat:n={n}", row.alpha)
        for t, e in row.overlaps:
            rec.add(f"overlap:n={n},t={t!r}", e.value, e.se)
        rows_out.append((n, row.m_hat.value, row.v_hat.value,
                         row.alpha if row.log_size else math.nan))
    rec.series["scaling"] = (("n", "m_hat", "v_hat", "alpha_hat"), rows_out)


def _run_prediction(cfg, rec, mc):
    s = parse_model_spec(cfg.model_spec)
    rep = est.prediction_check(s, mc, cfg.get("t", 0.5), cfg.get("x_grid", (1.0, 2.0, 3.0)))
    rec.add("m_hat", rep.m_hat.value, rep.m_hat.se)
    for x, f, b, ok in zip(rep.x_grid, rep.freq, rep.bound, rep.passes):
        rec.add(f"deviation:x={x!r}", f.value, f.se, b, ok)


def _run_slepian(cfg, rec, mc):
    sx = parse_model_spec(cfg.model_spec)
    sy = parse_model_spec(cfg.get("model_y"))
    rep = est.slepian_check(sx, sy, mc)
    rec.add("m_hat_x", rep.m_x.value, rep.m_x.se)
    rec.add("m_hat_y", rep.m_y.value, rep.m_y.se, None, rep.passed)


RUNNERS = {
    "identity": _run_identity,
    "overlap": _run_overlap,
    "variance": _run_variance,
    "peaks": _run_peaks,
    "tails": _run_tails,
    "bounds": _run_bounds,
    "scaling": _run_scaling,
    "prediction": _run_prediction,
    "slepian": _run_slepian,
}


def run_experiment(cfg: ExperimentConfig, mc: MCConfig | None = None) -> ResultRecord:
    mc = cfg.mc if mc is None else mc
    model = cfg.model_spec or ""
    if cfg.experiment == "slepian":
        model = f"{model} vs {cfg.get('model_y')}"
    rec = ResultRecord(cfg.experiment, model, mc.master_seed, mc.n_samples)
    rec.timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    start = time.perf_counter()
    RUNNERS[cfg.experiment](cfg, rec, mc)
    rec.wall_seconds = time.perf_counter() - start
    return rec

