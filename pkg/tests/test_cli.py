import json
import subprocess
import sys

import pytest

from neretin.aaut import swap, translation_b
from neretin.cli import main
from neretin.median import path
from test_aaut import BUDGET_CASE


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, data in {"swap": swap(2).to_json(), "b": translation_b().to_json(),
                       "p3": path(3).to_json(), "slow": BUDGET_CASE}.items():
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(json.dumps(data))
    paths["bad"] = tmp_path / "bad.json"
    paths["bad"].write_text("{not json")
    paths["chord"] = tmp_path / "chord.json"
    paths["chord"].write_text(json.dumps({"vertices": [0, 1, 2, 3], "edges": [[0, 1], [1, 2], [2, 3], [3, 0], [0, 2]]}))
    paths["dir"] = tmp_path
    return paths


def test_explore(capsys, files):
    code, out, _ = run(capsys, "explore", "--d", "2", "--radius", "0")
    assert code == 0 and len(json.loads(out)["vertices"]) == 1
    code, out, _ = run(capsys, "explore", "--d", "2", "--radius", "1")
    assert code == 0 and len(json.loads(out)["vertices"]) == 4
    assert run(capsys, "explore", "--d", "1")[0] == 64
    assert run(capsys, "explore", "--radius", "3", "--cap", "5")[0] == 2
    out_dir = files["dir"] / "ball"
    assert run(capsys, "explore", "--radius", "1", "--format", "both", "--out", str(out_dir))[0] == 0
    assert (out_dir / "ball.json").exists() and (out_dir / "ball.dot").read_text().startswith("graph")


def test_link(capsys):
    code, out, _ = run(capsys, "link", "--d", "2", "--h", "5")
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "PASS" and report["descending_link_f_vector"] == [10, 15]
    code, out, _ = run(capsys, "link", "--d", "3", "--h", "3")
    assert code == 0 and json.loads(out)["interval_complex_f_vector"] == [1]
    assert run(capsys, "link", "--d", "2", "--h", "4")[0] == 0
    assert run(capsys, "link", "--d", "3", "--h", "4")[0] == 64


def test_ipq(capsys):
    code, out, _ = run(capsys, "ipq", "--p", "2", "--q", "4", "--homology-dim", "1")
    report = json.loads(out)
    assert code == 0 and report["components"] == 3 and report["betti"][0] == 3


def test_classify(capsys, files):
    code, out, _ = run(capsys, "classify", str(files["swap"]))
    assert code == 0 and json.loads(out)["kind"] == "Elliptic"
    code, out, _ = run(capsys, "classify", str(files["b"]))
    report = json.loads(out)
    assert code == 0 and report["kind"] == "Translation"
    assert report["witness"] == {"address": "0", "exponent": 1, "image": "00"}
    assert run(capsys, "classify", str(files["bad"]))[0] == 65
    assert run(capsys, "classify", str(files["slow"]), "--budget", "1")[0] == 3


def test_parity(capsys, files):
    code, out, _ = run(capsys, "parity", str(files["swap"]))
    report = json.loads(out)
    assert code == 0 and report["parity"] is None


def test_fixpoint(capsys, files):
    code, out, _ = run(capsys, "fixpoint", str(files["p3"]))
    assert code == 0 and json.loads(out)["region"] == [1, 2]
    code, out, _ = run(capsys, "fixpoint", str(files["chord"]))
    assert code == 65 and len(json.loads(out)["violating_triple"]) == 3


def test_cremona(capsys):
    code, out, _ = run(capsys, "cremona", "--q", "4", "--mode", "census")
    report = json.loads(out)
    assert code == 0 and report["allEven"] and report["conventions"]["modulus"] == "t^2 + t + 1"
    code, out, _ = run(capsys, "cremona", "--q", "4", "--mode", "matrix", "--matrix", "1 0 0 0 01 0 0 0 1")
    assert code == 0 and json.loads(out)["sign"] == 1
    assert run(capsys, "cremona", "--q", "6")[0] == 64
    assert run(capsys, "cremona", "--q", "4", "--mode", "matrix", "--matrix", "1 0")[0] == 64


def test_verify(capsys):
    code, out, err = run(capsys, "verify", "trees", "--seed", "42")
    assert code == 0 and json.loads(out)["verdict"] == "PASS" and json.loads(out)["seed"] == 42
    assert "PASS criterion trees" in err
    assert run(capsys, "verify", "nope")[0] == 64


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["explore", "--bogus"])
    assert info.value.code == 64


def test_reports_are_byte_identical(capsys, files):
    first = run(capsys, "verify", "aaut", "--seed", "7")[1]
    second = run(capsys, "verify", "aaut", "--seed", "7")[1]
    assert first == second
    a = run(capsys, "cremona", "--q", "4", "--mode", "suite", "--seed", "1")[1]
    b = run(capsys, "cremona", "--q", "4", "--mode", "suite", "--seed", "1")[1]
    assert a == b and json.loads(a)["seed"] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "neretin", "ipq", "--q", "5"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["f_vector"] == [10, 15]
