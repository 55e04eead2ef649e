import io
import json
import os
import subprocess
import sys

import pytest

from hitchin_duality import CONVENTION, __version__, cli

EXAMPLE = os.path.join(os.path.dirname(__file__), "..", "examples", "b2_ssll.json")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_dual_b3_sc():
    code, out, _ = call("dual", "B3:sc")
    assert code == 0 and out.strip() == "C3:ad"


def test_pi1_a2_ad():
    code, out, _ = call("pi1", "A2:ad")
    assert code == 0 and out.strip() == "Z/3"


def test_center_and_epsilon_json():
    code, out, _ = call("center", "C3:sc", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"] == "pass"
    code, out, _ = call("epsilon", "C2:sc", "--format", "json")
    rows = json.loads(out)["results"]["roots"]
    assert sorted(r["epsilon"] for r in rows) == [1, 1, 2, 2]


def test_verify_duality_example():
    code, out, _ = call("verify-duality", EXAMPLE, "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert set(rep) == {"version", "convention", "input", "results", "verdict"}
    assert rep["version"] == __version__ and rep["convention"] == CONVENTION
    assert rep["verdict"] == "pass"
    assert rep["results"]["checks"] and all(c["pass"] for c in rep["results"]["checks"])


def test_bundled_example_by_name(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, _ = call("validate", "examples/b2_ssll.json")
    assert code == 0


def test_cover_subcommands_on_random_cover():
    for sub in ("validate", "cohomology", "prym"):
        code, out, _ = call(sub, "--group", "G2:sc", "--genus", "2", "--branches", "6",
                            "--seed", "3", "--format", "json")
        assert code == 0, sub
        assert json.loads(out)["input"]["seed"] == 3


@pytest.mark.parametrize("argv", [
    ["dual", "X9:sc"],
    ["pi1", "B3:zz"],
    ["validate"],
    ["validate", EXAMPLE, "--group", "B2:sc"],
    ["validate", "no_such_file.json"],
    ["hecke", "A2:ad", "--lambda", "1,x"],
    ["hecke", "A2:ad", "--lambda", "1"],
    ["sweep", "--type", "A", "--rank", "2", "--count", "-1"],
    ["frobnicate"],
])
def test_usage_errors_exit_64(argv):
    assert call(*argv)[0] == 64


def test_validation_failure_exits_1(tmp_path):
    bad = {"group": {"type": "B", "rank": 2, "isogeny": "sc"}, "genus": 1,
           "handles": [[], []], "branches": [{"root": [0, 1]}, {"root": [0, 1]}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out, err = call("verify-duality", str(path), "--format", "json")
    assert code == 1
    assert json.loads(out)["verdict"] == "fail"
    assert "validation" in err


def test_a1_requires_force():
    args = ["verify-duality", "--group", "A1:sc", "--genus", "2", "--branches", "4", "--seed", "1"]
    assert call(*args)[0] == 1
    assert call(*args, "--force")[0] == 0


def test_hecke_report():
    code, out, _ = call("hecke", "B2:ad", "--lambda", "1,0", "--format", "json")
    res = json.loads(out)["results"]
    assert code == 0
    assert res["topologically_trivial"] and res["shift_transitive"]
    assert res["pi1"] == "Z/2" and any(res["component_shift"])


def test_sweep_is_byte_identical():
    args = ["sweep", "--type", "B", "--rank", "2", "--count", "3", "--seed", "11", "--format", "json"]
    first, second = call(*args), call(*args)
    assert first[0] == 0
    assert first[1] == second[1]
    rows = json.loads(first[1])["results"]["rows"]
    assert [r["seed"] for r in rows] == [11, 12, 13] * 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hitchin_duality", "dual", "G2:sc"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "G2:sc"
