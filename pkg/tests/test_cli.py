import csv
import json
import math

import pytest

from czcrack.cli import main

FAST = """[normalized]
b = 4
beta = 0.5
delta_c = 0.238
m = 5
theta = 1
mode = elastic
[mesh]
h = 1e-3
[solver]
t_end = 1.0
"""


@pytest.fixture
def cfg(tmp_path, monkeypatch):
    monkeypatch.setenv("CZCRACK_THREADS", "1")
    p = tmp_path / "run.ini"
    p.write_text(FAST)
    return p


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_writes_trajectory_and_summary(cfg, tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    rows = _rows(out / "trajectory.csv")
    assert list(rows[0]) == ["t", "a", "c", "l", "delta", "pinned"]
    for r in rows:
        a, c, l = float(r["a"]), float(r["c"]), float(r["l"])
        assert abs(l - (c - a)) <= 1e-15 * max(1.0, abs(c))
        assert r["pinned"] in ("true", "false")
    assert any(r["pinned"] == "true" for r in rows)
    summ = json.loads((out / "summary.json").read_text())
    assert summ["outcome"] == "ruptured"
    assert 0.0 < summ["t_d"] < summ["t_r"]
    assert summ["n_nodes"] == len(rows)


def test_summary_is_bitwise_stable(cfg, tmp_path):
    for name in ("a", "b"):
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a" / "summary.json").read_bytes() == \
        (tmp_path / "b" / "summary.json").read_bytes()
    assert (tmp_path / "a" / "trajectory.csv").read_bytes() == \
        (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_run_flag_overrides(cfg, tmp_path):
    out = tmp_path / "v"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--mode", "visco"]) == 0
    summ = json.loads((out / "summary.json").read_text())
    assert summ["meta"]["mode"] == "viscoelastic"


def test_empty_sweep(cfg, tmp_path):
    grid = tmp_path / "grid.csv"
    grid.write_text("b,beta\n")
    out = tmp_path / "s"
    assert main(["sweep", "--config", str(cfg), "--grid", str(grid), "--out", str(out)]) == 0
    assert _rows(out / "table.csv") == []


def test_sweep_records_failing_cells(cfg, tmp_path):
    grid = tmp_path / "grid.csv"
    grid.write_text("b,beta,mode\n4,1/2,elastic\n4,6,elastic\n")
    out = tmp_path / "s"
    assert main(["sweep", "--config", str(cfg), "--grid", str(grid), "--out", str(out)]) == 0
    rows = _rows(out / "table.csv")
    assert len(rows) == 2
    assert float(rows[0]["t_r_e"]) > 0 and rows[0]["status_e"] == "ruptured"
    assert rows[1]["status_e"].startswith("error")
    sig = _rows(out / "table_4sig.csv")
    assert len(sig[0]["t_r_e"].replace(".", "").lstrip("0")) <= 4


def test_convergence_subcommand(tmp_path, monkeypatch):
    monkeypatch.setenv("CZCRACK_THREADS", "1")
    cfg = tmp_path / "c.ini"
    cfg.write_text("[normalized]\nb = 4\nbeta = 2\n")
    out = tmp_path / "c"
    assert main(["convergence", "--config", str(cfg), "--h-list", "0.04,0.02,0.01",
                 "--observable", "sigma_tip", "--probe-t", "0.6", "--out", str(out)]) == 0
    rep = json.loads((out / "convergence.json").read_text())
    assert len(rep["h"]) == 3 and rep["y_limit"] is not None
    assert len(_rows(out / "errors.csv")) == 3


def test_jump_subcommand(cfg, tmp_path):
    out = tmp_path / "j"
    assert main(["jump", "--config", str(cfg), "--out", str(out), "--probes", "4"]) == 0
    rep = json.loads((out / "jump.json").read_text())
    # probes needing a pinned step are skipped; Aitken needs three
    assert 3 <= len(rep["probes"]) <= 4 and "any_jump" in rep


def test_bad_config_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.ini"
    p.write_text("[normalized]\nb = 4\nbeta = oops\n")
    assert main(["run", "--config", str(p), "--out", str(tmp_path)]) == 2
    assert "normalized.beta" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.ini")]) == 2
