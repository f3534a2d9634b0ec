import csv
import subprocess
import sys

import pytest

from superconc.cli import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, main, resolve_seed
from superconc.config import parse_config


def _write(tmp_path, text, name="exp.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _values(out_dir):
    with open(out_dir / "results.csv", newline="") as fh:
        return [(r["point"], r["value"]) for r in csv.DictReader(fh)]


IDENTITY = "[experiment]\nname = identity\nmodel = iid:n=8\n[mc]\nn_samples = 4000\n"


def test_identity_passes(tmp_path, capsys):
    cfg = _write(tmp_path, IDENTITY)
    out = tmp_path / "out"
    assert main(["identity", "--config", cfg, "--out", str(out)]) == EXIT_PASS
    assert (out / "results.csv").exists() and (out / "summary.json").exists()
    assert "PASS" in capsys.readouterr().out


def test_original_sk_bounds_fail_with_exit_2(tmp_path):
    cfg = _write(tmp_path, "[experiment]\nname = bounds\nxi = x^2\n")
    assert main(["bounds", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_FAIL


def test_critical_mixture_bounds_pass(tmp_path):
    cfg = _write(tmp_path, "[experiment]\nname = bounds\nxi = cstar\n")
    assert main(["bounds", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_PASS


@pytest.mark.parametrize("text", [
    "[experiment]\nname = identity\nmodel = polymerX:n=4\n",
    "[experiment]\nname = identity\nmodel = iid:n=0\n",
    "[experiment]\nname = identity\nmodel = sk:n=30,xi=x^2,backend=kernel\n",
])
def test_errors_exit_1(tmp_path, capsys, text):
    cfg = _write(tmp_path, text)
    assert main(["identity", "--config", cfg, "--out", str(tmp_path / "o"), "--samples", "10"]) == EXIT_ERROR
    assert "error" in capsys.readouterr().err


def test_missing_config_file_exit_1(tmp_path):
    assert main(["identity", "--config", str(tmp_path / "nope.ini")]) == EXIT_ERROR


def test_resolve_seed_precedence():
    plain = parse_config(IDENTITY)
    seeded = parse_config(IDENTITY + "seed = 9\n")
    env = {"SUPERCONC_SEED": "42"}
    assert resolve_seed(3, seeded, env) == 3
    assert resolve_seed(None, seeded, env) == 9
    assert resolve_seed(None, plain, env) == 42
    assert resolve_seed(None, plain, {}) == 0


def test_env_seed_changes_results(tmp_path, monkeypatch):
    cfg = _write(tmp_path, IDENTITY)
    main(["identity", "--config", cfg, "--out", str(tmp_path / "a")])
    monkeypatch.setenv("SUPERCONC_SEED", "0")
    main(["identity", "--config", cfg, "--out", str(tmp_path / "b")])
    monkeypatch.setenv("SUPERCONC_SEED", "11")
    main(["identity", "--config", cfg, "--out", str(tmp_path / "c")])
    main(["identity", "--config", cfg, "--out", str(tmp_path / "d"), "--seed", "11"])
    assert _values(tmp_path / "a") == _values(tmp_path / "b")
    assert _values(tmp_path / "a") != _values(tmp_path / "c")
    assert _values(tmp_path / "c") == _values(tmp_path / "d")


def test_workers_flag_does_not_change_results(tmp_path):
    cfg = _write(tmp_path, IDENTITY)
    main(["identity", "--config", cfg, "--out", str(tmp_path / "a"), "--samples", "3000"])
    main(["identity", "--config", cfg, "--out", str(tmp_path / "b"), "--samples", "3000",
          "--workers", "2"])
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


def test_plots_flag_writes_tsv(tmp_path):
    cfg = _write(tmp_path, "[experiment]\nname = tails\nmodel = iid:n=8\nr_grid = 1, 2\n"
                           "[mc]\nn_samples = 500\n")
    out = tmp_path / "o"
    main(["tails", "--config", cfg, "--out", str(out), "--plots"])
    assert (out / "tails.tsv").exists()


def test_console_entry_point(tmp_path):
    cfg = _write(tmp_path, "[experiment]\nname = bounds\nxi = cstar\norder = 32\n")
    proc = subprocess.run(
        [sys.executable, "-m", "superconc.cli", "bounds", "--config", cfg, "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "c2_star" in proc.stdout
