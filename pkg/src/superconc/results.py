"""Result records and their CSV / JSON / TSV renderings."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

CSV_COLUMNS = ("experiment", "model", "point", "value", "se", "bound", "pass")


@dataclass
class Statistic:
    point: str  # statistic name, with its t / n / r point when it has one
    value: float
    se: float | None = None
    bound: float | None = None
    passed: bool | None = None


@dataclass
class ResultRecord:
    experiment: str
    model: str
    seed: int
    n_samples: int
    timestamp: str = ""
    wall_seconds: float = 0.0
    statistics: list = field(default_factory=list)
    series: dict = field(default_factory=dict)  # figure name -> (columns, rows)
    notes: dict = field(default_factory=dict)

    def add(self, point, value, se=None, bound=None, passed=None):
        self.statistics.append(Statistic(point, value, se, bound, passed))

    @property
    def passed(self):
        return all(s.passed for s in self.statistics if s.passed is not None)


def _num(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return repr(x) if math.isfinite(x) else str(x)


def results_csv(record: ResultRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for s in record.statistics:
        w.writerow([record.experiment, record.model, s.point, _num(s.value), _num(s.se),
                    _num(s.bound), _num(s.passed)])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def write_results(record: ResultRecord, out_dir) -> list:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    csv_path = d / "results.csv"
    csv_path.write_text(results_csv(record))
    summary = asdict(record)
    summary["passed"] = record.passed
    json_path = d / "summary.json"
    json_path.write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    return [csv_path, json_path]


def emit_plot_data(record: ResultRecord, out_dir) -> list:
    """One tab-separated file per figure series in the record."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, (columns, rows) in record.series.items():
        p = d / f"{name}.tsv"
        lines = ["\t".join(columns)]
        lines += ["\t".join(_num(v) for v in row) for row in rows]
        p.write_text("\n".join(lines) + "\n")
        paths.append(p)
    return paths
