"""End-to-end runs of the command-line entry point."""

import json
import subprocess
import sys

import pytest

ENVELOPE_KEYS = ["bounds", "command", "payload", "schema", "seed", "verdict", "wall_time"]


def run(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "relalg.cli", *argv],
        capture_output=True,
        text=True,
        timeout=300,
    )
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture()
def chain_file(tmp_path):
    path = tmp_path / "chain.json"
    path.write_text(json.dumps({
        "domain": ["a", "b", "c"],
        "relations": {"f": [["a", "b"]], "g": [["b", "c"]]},
    }))
    return str(path)


def test_eval_text_and_json(chain_file):
    code, out, _ = run("eval", "f ; g", "--structure", chain_file)
    assert code == 0
    assert "(a, c)" in out
    code, out, _ = run("eval", "f ; g", "--structure", chain_file, "--report", "json")
    assert code == 0
    doc = json.loads(out)
    assert sorted(doc) == ENVELOPE_KEYS
    assert doc["schema"] == 1
    assert doc["verdict"] == "ok"
    assert doc["payload"]["pairs"] == [["a", "c"]]


def test_translate_with_check():
    code, out, _ = run(
        "translate", "exists z . (R(x,z) & S(z,y))", "--check", "--max-size", "2"
    )
    assert code == 0
    assert "R ; S" in out
    assert "equivalent" in out


def test_check_pass_and_fail_exit_codes():
    code, _, _ = run("check", "fp", "f ; g", "--max-size", "2", "--samples", "15")
    assert code == 0
    code, out, _ = run("check", "fp", "f | g", "--max-size", "2", "--samples", "15")
    assert code == 1
    assert "counterexample" in out


def test_matrix_json_envelope():
    code, out, _ = run("matrix", "--max-size", "2", "--samples", "20",
                       "--report", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "pass"
    assert doc["payload"]["agrees"] is True


def test_construct_separation():
    code, out, _ = run("construct", "separation", "--report", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["payload"]["expected_closure"]) == 8


def test_verify_closure_and_converse_escape():
    code, _, _ = run("verify", "closure")
    assert code == 0
    code, out, _ = run(
        "verify", "closure", "--basis",
        "id,empty,dom,ran,antidom,inter,diff,compose,semijoin,prefunion,converse",
    )
    assert code == 1
    assert "escapees" in out


def test_synth_and_validation():
    code, out, _ = run(
        "synth", "forward", "--oracle", "dom(f)", "--radius", "1",
        "--validate-size", "3",
    )
    assert code == 0
    assert "validation: equivalent" in out
    code, out, _ = run("synth", "forward", "--oracle", "f^", "--auto-radius", "1")
    assert code == 1
    assert "no radius up to 1 fits" in out


def test_ef_modes(chain_file, tmp_path):
    loop = tmp_path / "loop.json"
    loop.write_text(json.dumps({"domain": ["a"], "relations": {"f": [["a", "a"]]}}))
    two = tmp_path / "two.json"
    two.write_text(json.dumps({"domain": ["a", "b"], "relations": {"f": [["a", "b"]]}}))
    code, out, _ = run("ef", "min-rank", "--left", str(loop), "--right", str(two))
    assert code == 0
    assert "least distinguishing rank: 1" in out
    code, _, _ = run("ef", "equiv", "--left", str(loop), "--right", str(two),
                     "--rank", "1")
    assert code == 1
    code, _, _ = run("ef", "union-compat", "--samples", "25", "--max-size", "3")
    assert code == 0


def test_replay_presets_all_pass():
    for preset in (
        "replay:matrix",
        "replay:separation",
        "replay:lasso",
        "replay:synthesis",
        "replay:union-compat",
    ):
        code, out, _ = run("run", preset)
        assert code == 0, (preset, out)
        assert "verdict: pass" in out, preset


def test_out_flag_writes_file(tmp_path, chain_file):
    target = tmp_path / "report.json"
    code, out, _ = run("eval", "f", "--structure", chain_file, "--report", "json",
                       "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["command"] == "eval"


def test_usage_and_input_errors_exit_two(chain_file, tmp_path):
    cases = (
        ("eval", "f ; ;", "--structure", chain_file),
        ("eval", "f", "--structure", str(tmp_path / "missing.json")),
        ("check", "nonsense", "f"),
        ("frobnicate",),
        ("eval",),
        ("translate", "!R(x,y)"),
    )
    for argv in cases:
        code, _, err = run(*argv)
        assert code == 2, (argv, code, err)
