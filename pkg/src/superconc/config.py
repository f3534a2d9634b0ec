"""Experiment configuration files.

Sectioned ``key = value`` text, for example::

    [experiment]
    name = overlap
    model = iid:n=16

    [mc]
    n_samples = 100000
    seed = 0
    t_grid = 0.05, 0.1, 0.2, 0.5, 1, 2

    [output]
    dir = results
    emit_plots = true

Experiment-specific keys (``r_grid``, ``n_list``, ``eps``, ``delta``, ``l``,
``t``, ``x_grid``, ``model_y``, ``xi``, ``order``, ``min_freq``) go in the
``[experiment]`` section.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field

from .errors import ModelSpecError, ParseError
from .montecarlo import MCConfig

EXPERIMENTS = (
    "identity", "overlap", "variance", "peaks", "tails",
    "bounds", "scaling", "prediction", "slepian",
)
SECTIONS = {
    "experiment": {"name", "model", "r_grid", "n_list", "eps", "delta", "l", "t",
                   "x_grid", "model_y", "xi", "order", "min_freq"},
    "mc": {"n_samples", "seed", "workers", "t_grid"},
    "output": {"dir", "emit_plots"},
}
REQUIRED = {
    "overlap": ("t_grid",),
    "tails": ("r_grid",),
    "scaling": ("n_list", "model"),
    "peaks": ("eps", "delta", "model"),
    "slepian": ("model", "model_y"),
}
FLOAT_LISTS = ("r_grid", "x_grid")
FLOATS = ("eps", "delta", "t", "min_freq")
INTS = ("l", "order")


def _floats(text):
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.replace(";", ",").split(",") if v.strip())


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    model_spec: str | None
    mc: MCConfig
    output_dir: str = "results"
    emit_plots: bool = False
    params: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)


class _Lines:
    """Line lookup for keys, since configparser does not keep positions."""

    def __init__(self, text):
        self.lines = text.splitlines()

    def find(self, section, key):
        current = None
        for no, raw in enumerate(self.lines, 1):
            s = raw.strip()
            m = re.match(r"^\[(.+)\]$", s)
            if m:
                current = m.group(1).strip()
            elif current == section and re.match(rf"^{re.escape(key)}\s*[=:]", s):
                return no
        return None

    def section(self, name):
        for no, raw in enumerate(self.lines, 1):
            if raw.strip() == f"[{name}]":
                return no
        return None


def _check_model(spec, line, key):
    from .models.spec import FAMILIES, split_spec

    try:
        if ":" not in spec and key == "model" and spec in FAMILIES:
            return
        split_spec(spec)
    except ModelSpecError as exc:
        raise ParseError(line, key, f"unknown model spec {exc.token!r}") from None


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Validate ``text`` and return an ExperimentConfig.

    ``experiment`` (e.g. from the command line) fills in or must match the
    ``name`` key.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError(exc.lineno, "-", "key outside of any section") from None
    except configparser.DuplicateOptionError as exc:
        raise ParseError(exc.lineno, exc.option, "duplicate key") from None
    except configparser.DuplicateSectionError as exc:
        raise ParseError(exc.lineno, exc.section, "duplicate section") from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ParseError(lineno, "-", "expected key = value") from None
    lines = _Lines(text)

    for sec in cp.sections():
        if sec not in SECTIONS:
            raise ParseError(lines.section(sec), sec, "unknown section")
        for key in cp[sec]:
            if key not in SECTIONS[sec]:
                raise ParseError(lines.find(sec, key), key, f"unknown key in [{sec}]")

    def raw(sec, key):
        return cp[sec][key] if cp.has_section(sec) and key in cp[sec] else None

    def convert(sec, key, fn):
        value = raw(sec, key)
        if value is None:
            return None
        try:
            return fn(value)
        except (ValueError, TypeError) as exc:
            raise ParseError(lines.find(sec, key), key, str(exc)) from None

    name = raw("experiment", "name")
    if experiment is not None:
        if name is not None and name != experiment:
            raise ParseError(lines.find("experiment", "name"), "name",
                             f"config is for {name!r}, not {experiment!r}")
        name = experiment
    if name is None:
        raise ParseError(None, "name", "experiment name missing")
    if name not in EXPERIMENTS:
        raise ParseError(lines.find("experiment", "name"), "name", f"unknown experiment {name!r}")

    model = raw("experiment", "model")
    if model is not None:
        _check_model(model, lines.find("experiment", "model"), "model")
    model_y = raw("experiment", "model_y")
    if model_y is not None:
        _check_model(model_y, lines.find("experiment", "model_y"), "model_y")
    if model is None and name != "bounds":
        raise ParseError(None, "model", "model spec missing")

    params = {}
    for key in FLOAT_LISTS:
        v = convert("experiment", key, _floats)
        if v is not None:
            if not v or any(x < 0 for x in v):
                raise ParseError(lines.find("experiment", key), key, "need nonnegative values")
            params[key] = v
    n_list = convert("experiment", "n_list", _ints)
    if n_list is not None:
        if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
            raise ParseError(lines.find("experiment", "n_list"), "n_list",
                             "need a strictly increasing list")
        params["n_list"] = n_list
    for key in FLOATS:
        v = convert("experiment", key, float)
        if v is not None:
            params[key] = v
    for key in INTS:
        v = convert("experiment", key, int)
        if v is not None:
            params[key] = v
    for key in ("model_y", "xi"):
        if raw("experiment", key) is not None:
            params[key] = raw("experiment", key)
    if "eps" in params and not params["eps"] > 0:
        raise ParseError(lines.find("experiment", "eps"), "eps", "must be positive")
    if "delta" in params and not params["delta"] >= 0:
        raise ParseError(lines.find("experiment", "delta"), "delta", "must be nonnegative")

    t_grid = convert("mc", "t_grid", _floats) or ()
    n_samples = convert("mc", "n_samples", int)
    seed = convert("mc", "seed", int)
    workers = convert("mc", "workers", int)
    try:
        mc = MCConfig(
            n_samples=100_000 if n_samples is None else n_samples,
            master_seed=0 if seed is None else seed,
            n_workers=1 if workers is None else workers,
            t_grid=t_grid,
        )
    except ValueError as exc:
        msg = str(exc)
        key = next((k for k in ("t_grid", "n_samples", "workers", "seed") if k in msg), "mc")
        raise ParseError(lines.find("mc", key), key, msg) from None
    if seed is not None:
        params["seed_explicit"] = True

    have = set(params) | ({"t_grid"} if t_grid else set()) | ({"model"} if model else set())
    for key in REQUIRED.get(name, ()):
        if key not in have:
            raise ParseError(None, key, f"required for {name}")

    emit = convert("output", "emit_plots", _bool)
    return ExperimentConfig(
        experiment=name,
        model_spec=model,
        mc=mc,
        output_dir=raw("output", "dir") or "results",
        emit_plots=bool(emit),
        params=params,
    )


def _fmt(v):
    if isinstance(v, tuple):
        return ", ".join(repr(x) for x in v)
    return repr(v) if isinstance(v, float) else str(v)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Text that parses back to an equal config."""
    out = ["[experiment]", f"name = {cfg.experiment}"]
    if cfg.model_spec is not None:
        out.append(f"model = {cfg.model_spec}")
    for key in sorted(cfg.params):
        if key != "seed_explicit":
            out.append(f"{key} = {_fmt(cfg.params[key])}")
    out += ["", "[mc]", f"n_samples = {cfg.mc.n_samples}"]
    if cfg.params.get("seed_explicit"):
        out.append(f"seed = {cfg.mc.master_seed}")
    out.append(f"workers = {cfg.mc.n_workers}")
    if cfg.mc.t_grid:
        out.append(f"t_grid = {_fmt(cfg.mc.t_grid)}")
    out += ["", "[output]", f"dir = {cfg.output_dir}",
            f"emit_plots = {'true' if cfg.emit_plots else 'false'}", ""]
    return "\n".join(out)
