import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from inverse_ramsey.cli import main
from inverse_ramsey.config import load_config, parse_config
from inverse_ramsey.curves import CurveKind, CurveTrace, polyline_intersections
from inverse_ramsey.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env)


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


ECON = """
[economy]
[[economy.goods]]
e = 0.6
[[economy.goods]]
e = {e2}
theta = {th}
"""


def test_config_round_trip():
    cfg = load_config(CONFIGS / "figure1.toml")
    assert cfg.revenue == 0.5 and cfg.economy.good2.theta == 0.55
    assert cfg.trace["t1"] == [-0.5, 1.5]


@pytest.mark.parametrize("raw", [
    {},
    {"economy": {"goods": [{"e": 0.6}]}},
    {"economy": {"goods": [{"e": 0.6}, {"e": -1.0}]}},
    {"economy": {"goods": [{"e": 0.6}, {"e": 1.0, "theta": 1.5}]}},
    {"economy": {"goods": [{"e": 0.6}, {"e": 1.0}], "mode": "both"}},
    {"economy": {"goods": [{"e": 0.6}, {"e": 1.0}]}, "revenue": -0.1},
    {"economy": {"goods": [{"e": 0.6}, {"e": 1.0}]}, "bogus": 1},
])
def test_config_rejects(raw):
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_classify_figures():
    labels = []
    for k in range(1, 5):
        r = run("classify", "--config", str(CONFIGS / f"figure{k}.toml"))
        assert r.exit_code == 0, r.output
        labels.append(json.loads(r.output)["case"])
    assert labels == ["Case1", "Case2", "Case3", "Case4"]


def test_solve_ramsey_not_inverse():
    r = run("solve", "--config", str(CONFIGS / "ramsey.toml"))
    assert r.exit_code == 0
    assert json.loads(r.output)["inverse_ramsey"] is False


def test_solve_adjusted_mode_and_csv():
    a = json.loads(run("solve", "--config", str(CONFIGS / "figure2.toml"), "--mode", "adjusted").output)
    b = json.loads(run("adjust", "--config", str(CONFIGS / "figure2.toml")).output)
    assert a == b and a["t1"] >= 0
    r = run("solve", "--config", str(CONFIGS / "figure1.toml"), "--format", "csv")
    row = next(csv.DictReader(io.StringIO(r.output)))
    assert float(row["t2"]) > float(row["t1"]) > 0


def test_trace_intersections_match_solve_and_adjust(tmp_path):
    out = tmp_path / "f1.csv"
    r = run("trace", "--config", str(CONFIGS / "figure1.toml"), "--out", str(out))
    assert r.exit_code == 0, r.output
    rows = list(csv.DictReader(out.open()))
    assert {row["kind"] for row in rows} == {k.value for k in CurveKind}

    def curve(kind):
        pts = np.array([[float(x["t1"]), float(x["t2"])] for x in rows if x["kind"] == kind])
        return CurveTrace(CurveKind(kind), pts)

    sol = json.loads(run("solve", "--config", str(CONFIGS / "figure1.toml")).output)
    adj = json.loads(run("adjust", "--config", str(CONFIGS / "figure1.toml")).output)
    foc = curve("PerceivedFOC")
    (p,) = polyline_intersections(foc, curve("PerceivedBudget"))
    assert np.allclose(p, (sol["t1"], sol["t2"]), atol=1e-6)
    (q,) = polyline_intersections(foc, curve("TrueBudget"))
    assert np.allclose(q, (adj["t1"], adj["t2"]), atol=1e-6)
    (q2,) = polyline_intersections(foc, curve("AdjustedPerceivedBudget"))
    assert np.allclose(q2, q, atol=1e-6)


def test_outputs_deterministic(tmp_path):
    cfg = str(CONFIGS / "figure2.toml")
    for cmd in (["trace"], ["lumpsum"], ["solve", "--format", "csv"]):
        a = run(*cmd, "--config", cfg).output
        b = run(*cmd, "--config", cfg).output
        assert a == b


def test_sweep(tmp_path):
    cfg = write(tmp_path, "revenue = 0.1\n" + ECON.format(e2=2.5, th=0.55) +
                "[sweep]\ntheta2 = {min = 0.3, max = 0.9, n = 4}\ne2 = {min = 1.0, max = 4.0, n = 3}\n")
    r1 = run("sweep", "--config", cfg, env={"RI_THREADS": "1"})
    r4 = run("sweep", "--config", cfg, env={"RI_THREADS": "4"})
    assert r1.exit_code == 0 and r1.output == r4.output
    rows = list(csv.DictReader(io.StringIO(r1.output)))
    assert len(rows) == 12
    assert {"theta2", "e2", "case", "status", "inverse_ramsey"} <= set(rows[0])
    js = json.loads(run("sweep", "--config", cfg, "--format", "json").output)
    assert len(js) == 12
    bad = run("sweep", "--config", cfg, env={"RI_THREADS": "zero"})
    assert bad.exit_code == 4


def test_lumpsum_and_existence():
    rep = json.loads(run("lumpsum", "--config", str(CONFIGS / "figure2.toml")).output)
    assert rep["commodity_preferred"] is True
    ex = json.loads(run("existence", "--config", str(CONFIGS / "figure1.toml")).output)
    assert ex["theta_bar"] > ex["lower_bound"] == pytest.approx(0.24)


def test_verify_seeded(tmp_path):
    cfg = write(tmp_path, ECON.format(e2=2.5, th=0.55) + "[verify]\nsamples = 2\ngrid_n = 401\n")
    a = run("verify", "--config", cfg, "--seed", "11")
    assert a.exit_code == 0, a.output
    rep = json.loads(a.output)
    assert rep["all_pass"] and len(rep["samples"]) == 2 and rep["seed"] == 11
    assert a.output == run("verify", "--config", cfg, "--seed", "11").output


def test_exit_codes(tmp_path):
    infeasible = write(tmp_path, "revenue = 50.0\n" + ECON.format(e2=2.5, th=0.55), "inf.toml")
    r = run("solve", "--config", infeasible)
    assert r.exit_code == 2
    err = json.loads(r.stderr if hasattr(r, "stderr") else r.output)
    assert err["error"] == "Infeasible" and "max_revenue" in err

    boundary = write(tmp_path, ECON.format(e2=2.5, th=0.5), "b.toml")
    assert run("classify", "--config", boundary).exit_code == 3
    degenerate_ok = run("solve", "--config", boundary)
    assert degenerate_ok.exit_code == 0 and json.loads(degenerate_ok.output)["condition"] is None

    assert run("solve", "--config", str(tmp_path / "missing.toml")).exit_code == 4
    assert run("solve", "--config", write(tmp_path, "economy = [", "bad.toml")).exit_code == 4
    bad_window = write(tmp_path, ECON.format(e2=2.5, th=0.55) + "[trace]\nt1 = [1.0, 0.0]\n", "w.toml")
    assert run("trace", "--config", bad_window).exit_code == 4
