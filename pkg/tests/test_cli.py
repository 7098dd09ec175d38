import csv
import io
import json
import subprocess
import sys

import pytest

from permsynth.cli import EXIT_INVALID, EXIT_OK, EXIT_TIMEOUT, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synth_and_verify_round_trip(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, _, _ = run(capsys, "synth", "--graph", "path:8", "--perm", "reversal",
                     "--method", "odd-even", "--out", str(out))
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["status"] == "ok" and doc["metrics"]["size"] == 28 and doc["metrics"]["depth"] == 8
    assert doc["metrics"]["cnot_equivalent_size"] == 84
    code, text, _ = run(capsys, "verify", "--circuit", str(out), "--graph", "path:8", "--perm", "reversal")
    assert code == EXIT_OK and text.startswith("ok")
    code, text, _ = run(capsys, "verify", "--circuit", str(out), "--graph", "path:8", "--perm", "1,0,2,3,4,5,6,7")
    assert code == EXIT_INVALID and "wrong-function" in text


def test_corrupted_circuit_fails_verify(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 3, "gates": [{"kind": "swap", "qubits": [0, 2]}]}))
    code, text, _ = run(capsys, "verify", "--circuit", str(bad), "--graph", "path:3", "--perm", "2,1,0")
    assert code == EXIT_INVALID and "off-graph" in text
    bad.write_text("{not json")
    assert run(capsys, "verify", "--circuit", str(bad), "--graph", "path:3", "--perm", "2,1,0")[0] == EXIT_INVALID


def test_synth_exact_and_text(capsys):
    code, out, _ = run(capsys, "synth", "--graph", "path:2", "--perm", "1,0", "--method", "cnot-opt")
    assert code == EXIT_OK and json.loads(out)["optimum"] == 3
    code, out, _ = run(capsys, "synth", "--graph", "ring:5", "--perm", "random:3",
                       "--method", "rowcol", "--order", "sample:2:1", "--format", "text")
    assert code == EXIT_OK and out.startswith("size: ")


def test_synth_timeout_exit_code(capsys):
    code, out, _ = run(capsys, "synth", "--graph", "grid:3x3", "--perm", "reversal",
                       "--method", "cnot-opt", "--objective", "size", "--time-limit", "0.5")
    assert code == EXIT_TIMEOUT
    doc = json.loads(out)
    assert doc["status"] == "timeout" and doc["lower_bound"] >= 1


def test_bad_inputs(capsys):
    assert run(capsys, "synth", "--graph", "path:3", "--perm", "1,1,0", "--method", "lr-synth")[0] == EXIT_INVALID
    assert run(capsys, "synth", "--graph", "ring:4", "--perm", "reversal", "--method", "odd-even")[0] == EXIT_INVALID
    code, _, err = run(capsys, "sweep", "--graph", "path:9", "--method", "swap-opt")
    assert code == EXIT_INVALID and "random:" in err


def test_sweep_rows(capsys):
    code, out, err = run(capsys, "sweep", "--graph", "path:3", "--method", "swap-opt",
                         "--objective", "size", "--workers", "1")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    assert {r["perm"]: int(r["optimum"]) for r in rows}["2,1,0"] == 3
    assert "histogram={0:1, 1:2, 2:2, 3:1}" in err


def test_bench_csv(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--topology", "grid", "--sizes", "4,6", "--perms", "2",
                     "--methods", "lr-synth,rowcol", "--workers", "1", "--out", str(out))
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "topology,n,method,mean_size,mean_depth,mean_wall_ms,samples,seed"
    assert len(lines) == 5
    assert run(capsys, "bench", "--topology", "grid", "--sizes", "7", "--methods", "lr-synth")[0] == EXIT_INVALID
    assert run(capsys, "bench", "--topology", "ring", "--sizes", "4", "--methods", "odd-even")[0] == EXIT_INVALID


def test_compile_json(capsys):
    code, out, _ = run(capsys, "compile", "--qubits", "5", "--method", "lr-synth", "--seed", "1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["method"] == "lr-synth" and doc["objective"] == "depth"
    assert set(doc["before"]) == set(doc["after"]) == {"size", "depth"}
    assert all(b["accepted"] or b["method_depth"] is not None or b["flags"] for b in doc["blocks"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "permsynth", "synth", "--graph", "path:3",
                           "--perm", "2,1,0", "--method", "lr-synth"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["metrics"]["size"] == 3
