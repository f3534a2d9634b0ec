import csv
import json

from superconc.config import parse_config
from superconc.experiments import run_experiment
from superconc.results import CSV_COLUMNS, ResultRecord, emit_plot_data, write_results


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_empty_record_header_only(tmp_path):
    write_results(ResultRecord("identity", "iid:n=8", 0, 10), tmp_path)
    assert (tmp_path / "results.csv").read_text() == ",".join(CSV_COLUMNS) + "\n"
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["statistics"] == [] and summary["passed"] is True


def test_row_format(tmp_path):
    rec = ResultRecord("identity", "iid:n=8", 0, 10)
    rec.add("v_hat", 0.5, 0.01)
    rec.add("z", 1.25, None, 3, True)
    write_results(rec, tmp_path)
    rows = _rows(tmp_path / "results.csv")
    assert rows[1] == ["identity", "iid:n=8", "v_hat", "0.5", "0.01", "", ""]
    assert rows[2] == ["identity", "iid:n=8", "z", "1.25", "", "3", "true"]


def test_model_with_commas_is_quoted(tmp_path):
    rec = ResultRecord("identity", "nk:N=8,K=2", 0, 10)
    rec.add("v_hat", 1.0)
    write_results(rec, tmp_path)
    assert _rows(tmp_path / "results.csv")[1][1] == "nk:N=8,K=2"


def _overlap_cfg(seed=5):
    return parse_config(
        "[experiment]\nname = overlap\nmodel = iid:n=16\n"
        f"[mc]\nn_samples = 2000\nseed = {seed}\nt_grid = 0.05, 0.1, 0.2, 0.5, 1, 2\n"
    )


def test_six_point_curve_six_overlap_rows(tmp_path):
    rec = run_experiment(_overlap_cfg())
    write_results(rec, tmp_path)
    rows = _rows(tmp_path / "results.csv")[1:]
    assert len([r for r in rows if r[2].startswith("overlap:")]) == 6
    paths = emit_plot_data(rec, tmp_path)
    assert [p.name for p in paths] == ["overlap_curve.tsv"]
    lines = (tmp_path / "overlap_curve.tsv").read_text().splitlines()
    assert lines[0].split("\t") == ["t", "value", "se", "varconv_upper"]
    assert len(lines) == 7


def test_rerun_byte_identical_csv(tmp_path):
    for sub in ("a", "b"):
        write_results(run_experiment(_overlap_cfg()), tmp_path / sub)
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()
    ja = json.loads((tmp_path / "a" / "summary.json").read_text())
    jb = json.loads((tmp_path / "b" / "summary.json").read_text())
    for j in (ja, jb):
        j.pop("timestamp")
        j.pop("wall_seconds")
    assert ja == jb


def test_different_seed_changes_values(tmp_path):
    a = run_experiment(_overlap_cfg(1))
    b = run_experiment(_overlap_cfg(2))
    assert [s.value for s in a.statistics] != [s.value for s in b.statistics]


def test_scaling_and_tails_tsv(tmp_path):
    cfg = parse_config("[experiment]\nname = scaling\nmodel = polymer\nn_list = 4, 8\n"
                       "[mc]\nn_samples = 500\n")
    emit_plot_data(run_experiment(cfg), tmp_path)
    lines = (tmp_path / "scaling.tsv").read_text().splitlines()
    assert lines[0].split("\t") == ["n", "m_hat", "v_hat", "alpha_hat"]
    assert [ln.split("\t")[0] for ln in lines[1:]] == ["4", "8"]

    cfg = parse_config("[experiment]\nname = tails\nmodel = iid:n=8\nr_grid = 1, 2, 3\n"
                       "[mc]\nn_samples = 500\n")
    emit_plot_data(run_experiment(cfg), tmp_path)
    head = (tmp_path / "tails.tsv").read_text().splitlines()[0].split("\t")
    assert head == ["r", "upper", "upper_se", "lower", "lower_se", "borell"]
