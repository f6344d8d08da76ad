from __future__ import annotations

import json
import subprocess
import sys

import pytest

from vodmlg.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synthesize_diamond(capsys, scenario_dir):
    code, out, err = _run(capsys, "synthesize", str(scenario_dir / "diamond.json"))
    assert code == 0
    assert "objective: 12.000000" in out and err == ""


def test_synthesize_machine_to_file(capsys, scenario_dir, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = _run(capsys, "synthesize", str(scenario_dir / "diamond.json"), "--format", "machine", "--out", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["objective"] == 12.0


def test_validate_bad(capsys, scenario_dir):
    code, out, _ = _run(capsys, "validate", str(scenario_dir / "bad.json"))
    assert code == 1
    assert "SubscriberAdjacency" in out


def test_synthesize_refuses_invalid_structure(capsys, scenario_dir):
    code, out, _ = _run(capsys, "synthesize", str(scenario_dir / "bad.json"))
    assert code == 1 and "SubscriberAdjacency" in out


def test_validate_clean(capsys, scenario_dir):
    code, out, _ = _run(capsys, "validate", str(scenario_dir / "diamond.json"))
    assert code == 0 and "status: Valid" in out


def test_validate_flows(capsys, scenario_dir, tmp_path):
    report = tmp_path / "r.json"
    assert main(["synthesize", str(scenario_dir / "two_server.json"), "--format", "machine", "--out", str(report)]) == 0
    code, _, _ = _run(capsys, "validate", str(scenario_dir / "two_server.json"), "--flows", str(report))
    assert code == 0
    short = tmp_path / "short.json"
    short.write_text(json.dumps({"flows": [{"commodity": "d0", "path": ["vs1", "na1", "a1"], "amount": 3}]}))
    code, out, _ = _run(capsys, "validate", str(scenario_dir / "two_server.json"), "--flows", str(short))
    assert code == 1 and "DemandDeficit" in out


def test_missing_file(capsys):
    code, _, err = _run(capsys, "synthesize", "no/such/file.json")
    assert code == 2 and "file.json" in err


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "x.json"
    bad.write_text('{"entities": []')
    code, _, err = _run(capsys, "validate", str(bad))
    assert code == 2 and "line 1" in err


def test_usage_errors(capsys, scenario_dir):
    assert _run(capsys, "frobnicate")[0] == 2
    assert _run(capsys)[0] == 2
    assert _run(capsys, "synthesize", str(scenario_dir / "diamond.json"), "--format", "xml")[0] == 2
    assert _run(capsys, "synthesize", str(scenario_dir / "diamond.json"), "--node-limit", "0")[0] == 2


def test_infeasible_exit(capsys, tmp_path):
    from vodmlg.instances import line

    path = tmp_path / "tight.json"
    path.write_text(line(11).to_json())
    code, out, _ = _run(capsys, "synthesize", str(path))
    assert code == 1 and "Infeasible" in out
    assert _run(capsys, "oracle", str(path))[0] == 1


def test_solver_limit_exit(capsys, scenario_dir):
    code, _, err = _run(capsys, "synthesize", str(scenario_dir / "diamond.json"), "--iteration-limit", "1")
    assert code == 1 and "IterationLimitExceeded" in err


def test_oracle(capsys, scenario_dir):
    code, out, _ = _run(capsys, "oracle", str(scenario_dir / "capacity_split.json"))
    assert code == 0 and "objective: 20.000000" in out
    code, _, err = _run(capsys, "oracle", str(scenario_dir / "desk_scale.json"))
    assert code == 1 and "TooLargeForOracle" in err


@pytest.mark.parametrize("fmt", ["table", "machine"])
def test_deterministic_output(capsys, scenario_dir, fmt):
    runs = [_run(capsys, "synthesize", str(scenario_dir / "two_server.json"), "--format", fmt) for _ in range(3)]
    assert len(set(runs)) == 1


def test_module_entry_point(scenario_dir):
    proc = subprocess.run([sys.executable, "-m", "vodmlg", "synthesize", str(scenario_dir / "diamond.json")], capture_output=True, text=True)
    assert proc.returncode == 0 and "objective: 12.000000" in proc.stdout
