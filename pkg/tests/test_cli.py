import json
import subprocess
import sys
from pathlib import Path

import pytest

from polympi.cli import main

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"
INF = str(PROBLEMS / "inf_norm.yaml")


def test_run_writes_trace_raster_and_figure(tmp_path, capsys):
    trace, raster, fig = tmp_path / "t.json", tmp_path / "r.csv", tmp_path / "f.png"
    code = main(["run", INF, "--trace", str(trace), "--raster", str(raster), "--grid", "21", "--figure", str(fig)])
    out = capsys.readouterr().out
    assert code == 0
    assert "status=converged k_final=2" in out
    doc = json.loads(trace.read_text())
    assert len(doc["iterations"]) == 3
    assert raster.read_text().splitlines()[0] == "x1,x2,X0,X1,X2"
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_run_with_small_k_max_is_unsuccessful(tmp_path):
    assert main(["run", INF, "--trace", str(tmp_path / "t.json"), "--kmax", "1"]) == 2


def test_run_empty_problem(tmp_path):
    prob = tmp_path / "empty.yaml"
    prob.write_text(Path(INF).read_text().replace("1 - x1\n", "x1 - 1\n").replace("1 + x1\n", "-x1 - 1\n"))
    assert main(["run", str(prob), "--trace", str(tmp_path / "t.json")]) == 3
    assert json.loads((tmp_path / "t.json").read_text())["status"] == "empty"


def test_invalid_problem_exit_code(tmp_path, capsys):
    prob = tmp_path / "bad.yaml"
    prob.write_text("variables: 2\nconstraints: [1 - x1]\n")
    assert main(["run", str(prob), "--trace", str(tmp_path / "t.json")]) == 4
    assert "dynamics" in capsys.readouterr().err


def test_unwritable_trace_exit_code(tmp_path, capsys):
    code = main(["run", INF, "--trace", str(tmp_path / "missing" / "t.json"), "--kmax", "0"])
    assert code == 5
    assert "missing" in capsys.readouterr().err


def test_check_reports_fixed_point(tmp_path, capsys):
    report = tmp_path / "check.json"
    assert main(["check", INF, "--json", str(report)]) == 0
    out = capsys.readouterr().out
    assert "witness=(0, 0)" in out and "exact_fixed_point=True" in out
    doc = json.loads(report.read_text())
    assert doc["fixed_point"]["upper"] == 0 and doc["fixed_point"]["witness"] == ["0", "0"]
    assert doc["bounded"]["verdict"] is True


def test_verify_roundtrip(tmp_path, capsys):
    trace = tmp_path / "t.json"
    assert main(["run", INF, "--trace", str(trace)]) == 0
    assert main(["verify", INF, str(trace)]) == 0
    assert "invariant (certified)" in capsys.readouterr().out


def test_verify_refutes_tampered_trace(tmp_path):
    trace = tmp_path / "t.json"
    main(["run", INF, "--trace", str(trace)])
    doc = json.loads(trace.read_text())
    doc["omega"]["constraints"] = doc["omega"]["constraints"][:4]
    trace.write_text(json.dumps(doc))
    assert main(["verify", INF, str(trace)]) == 6


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "polympi.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "run" in out.stdout
