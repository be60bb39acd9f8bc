import csv
import json
import subprocess
import sys

import pytest

from locbench.cli import run
from locbench.instances import TransportInstance, write_instance

GEN_FLAGS = {
    "tp": ["--n", "3", "--m", "3"],
    "itp": ["--n", "2", "--m", "2"],
    "planar": ["--n", "8"],
    "spcp": ["--n", "8", "--m", "10", "--strata", "3", "--p", "3"],
    "medianplex": ["--n", "6", "--p", "2"],
    "evdp": ["--F", "0.5"],
}


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_solve_single_lane(tmp_path, capsys):
    p = write_json(tmp_path / "tp.json",
                   {"type": "tp", "payload": {"supplies": [5], "demands": [5], "costs": [[3]]}})
    assert run(["solve", "--in", p, "--method", "simplex", "--no-timing"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["objective"] == 15
    assert {"problem", "method", "objective", "wall_ms", "seed"} <= set(rec)
    assert rec["wall_ms"] is None


def test_check_itp_gaps(tmp_path, capsys):
    p = str(tmp_path / "itp.json")
    assert run(["gen", "--type", "itp", "--seed", "3", "--out", p]) == 0
    assert run(["check", "--in", p]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert all(c["gap"] >= 0 for c in rec["solution"]["checks"])


def test_spcp_pipeline_smoke(tmp_path):
    x = str(tmp_path / "x.json")
    assert run(["gen", "--type", "spcp", "--n", "8", "--m", "10", "--strata", "3",
                "--p", "3", "--seed", "7", "--out", x]) == 0
    assert run(["solve", "--in", x, "--out", str(tmp_path / "r.json")]) == 0


def test_schema_error_exit_2(tmp_path, capsys):
    p = write_json(tmp_path / "bad.json", {"type": "tp", "payload": {"supplies": [1], "demands": [1]}})
    assert run(["solve", "--in", p]) == 2
    assert capsys.readouterr().err.startswith("ERR:2:")


def test_missing_file_exit_2(tmp_path, capsys):
    assert run(["solve", "--in", str(tmp_path / "none.json")]) == 2


def test_infeasible_balance_exit_3(tmp_path, capsys):
    p = tmp_path / "inf.json"
    write_instance(TransportInstance([1], [2], [[1]]), p)
    assert run(["solve", "--in", str(p)]) == 3
    assert capsys.readouterr().err.startswith("ERR:3:InfeasibleBalance")
    assert run(["validate", "--in", str(p)]) == 2
    assert "infeasible balance" in capsys.readouterr().out


def test_alpha_violation_exit_3(tmp_path, capsys):
    doc = {"type": "medianplex", "payload": {"weights": [1, 1], "dist": [[0, 1], [1, 0]],
                                             "r": 10, "gamma": 1, "phi": 0, "alpha": 5, "K": 1}}
    p = write_json(tmp_path / "mp.json", doc)
    assert run(["solve", "--in", p, "--method", "kmedian"]) == 3
    assert "AlphaViolation" in capsys.readouterr().err


def test_bad_method_exit_2(tmp_path, capsys):
    p = str(tmp_path / "tp.json")
    run(["gen", "--type", "tp", "--out", p])
    assert run(["solve", "--in", p, "--method", "weiszfeld"]) == 2


def test_validate_pass(tmp_path, capsys):
    p = str(tmp_path / "tp.json")
    run(["gen", "--type", "tp", "--out", p])
    assert run(["validate", "--in", p]) == 0
    assert capsys.readouterr().out.strip() == "pass"


def test_evdp_csv(tmp_path):
    p, out = str(tmp_path / "ev.json"), tmp_path / "traj.csv"
    run(["gen", "--type", "evdp", "--F", "0.5", "--out", p])
    assert run(["solve", "--in", p, "--format", "csv", "--out", str(out),
                "--grid", "21,21,21", "--controls", "5"]) == 0
    rows = list(csv.reader(open(out)))
    assert rows[0][3] == "v_kmh" and len(rows) == 6


def test_plotdata(tmp_path):
    square = write_json(tmp_path / "sq.json", {"type": "planar", "payload": {
        "points": [[0, 0], [1, 0], [0, 1], [1, 1]], "weights": [1, 1, 1, 1]}})
    out = tmp_path / "grid.csv"
    assert run(["plotdata", "--in", square, "--grid", "50,50", "--out", str(out)]) == 0
    rows = [tuple(map(float, r)) for r in list(csv.reader(open(out)))[1:]]
    assert len(rows) == 2500
    x, y, _ = min(rows, key=lambda r: r[2])
    assert abs(x - 0.5) < 0.05 and abs(y - 0.5) < 0.05
    pts = tmp_path / "grid_points.csv"
    assert pts.read_text().splitlines()[0] == "x,y,weight"
    first = out.read_bytes()
    run(["plotdata", "--in", square, "--grid", "50,50", "--out", str(out)])
    assert out.read_bytes() == first


def test_plotdata_rejects_non_planar(tmp_path, capsys):
    p = str(tmp_path / "tp.json")
    run(["gen", "--type", "tp", "--out", p])
    assert run(["plotdata", "--in", p, "--out", str(tmp_path / "g.csv")]) == 2


def pipeline(kind, root):
    root.mkdir()
    inst = str(root / "inst.json")
    assert run(["gen", "--type", kind, "--seed", "11", "--out", inst, *GEN_FLAGS[kind]]) == 0
    assert run(["solve", "--in", inst, "--no-timing", "--out", str(root / "solve.json")]) == 0
    assert run(["check", "--in", inst, "--no-timing", "--out", str(root / "check.json")]) == 0
    return {f: (root / f).read_bytes() for f in ("inst.json", "solve.json", "check.json")}


@pytest.mark.parametrize("kind", list(GEN_FLAGS))
def test_pipeline_byte_stable(kind, tmp_path):
    a = pipeline(kind, tmp_path / "a")
    b = pipeline(kind, tmp_path / "b")
    assert a == b
    assert json.loads(a["check.json"])["solution"]["all_ok"]


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "locbench", "gen", "--type", "tp", "--seed", "2"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["type"] == "tp"
