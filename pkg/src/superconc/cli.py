"""Command line: ``superconc <experiment> --config FILE [options]``.

Exit status is 0 when every check passes, 2 when a statistical check fails
and 1 on any error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import EXPERIMENTS, parse_config
from .errors import SuperconcError
from .experiments import run_experiment
from .results import emit_plot_data, write_results

log = logging.getLogger("superconc")

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def build_parser():
    p = argparse.ArgumentParser(prog="superconc", description=__doc__.splitlines()[0])
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="experiment config file")
    p.add_argument("--seed", type=int, help="master seed (default: config, then $SUPERCONC_SEED, then 0)")
    p.add_argument("--samples", type=int, help="number of Monte Carlo replicas")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", help="output directory")
    p.add_argument("--plots", action="store_true", help="also write plot-ready TSV files")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_seed(args_seed, cfg, environ=os.environ):
    if args_seed is not None:
        return args_seed
    if cfg.get("seed_explicit"):
        return cfg.mc.master_seed
    env = environ.get("SUPERCONC_SEED")
    if env:
        return int(env)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read(), experiment=args.experiment)
        changes = {"master_seed": resolve_seed(args.seed, cfg)}
        if args.samples is not None:
            changes["n_samples"] = args.samples
        if args.workers is not None:
            changes["n_workers"] = args.workers
        mc = cfg.mc.replace(**changes)
        rec = run_experiment(cfg, mc)
        out = args.out or cfg.output_dir
        write_results(rec, out)
        if args.plots or cfg.emit_plots:
            emit_plot_data(rec, out)
    except (SuperconcError, ValueError, OSError) as exc:
        print(f"superconc: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for s in rec.statistics:
        flag = "" if s.passed is None else ("  PASS" if s.passed else "  FAIL")
        se = "" if s.se is None else f" +- {s.se:.4g}"
        print(f"{s.point:<32} {s.value:.6g}{se}{flag}")
    log.info("wrote %s (%.1f s)", out, rec.wall_seconds)
    return EXIT_PASS if rec.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
