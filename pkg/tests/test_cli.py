import json
import subprocess
import sys

import pytest

from locfac import cli
from locfac.suites import BRANCHES

BASE = {
    "base": {"p": 5, "f": 1, "precision": 10, "name": "F"},
    "extensions": [
        {"name": "U3", "kind": "unramified", "over": "F", "degree": 3},
        {"name": "R2", "kind": "eisenstein", "over": "F", "poly": "x^2-5"},
        {"name": "R2U3", "kind": "compositum", "of": ["R2", "U3"]},
    ],
    "characters": [
        {"name": "xi", "field": "R2", "conductor": 2, "images": [[4, 1], [5, 2]],
         "uniformizer": {"root": [1, 0], "p_half_power": 0}},
        {"name": "xi3", "field": "U3", "conductor": 2, "images": [[124, 0], [5, 1], [5, 0], [5, 0]]},
        {"name": "chi", "field": "F", "conductor": 1, "images": [[4, 1]], "uniformizer": {"root": [3, 1]}},
    ],
    "params": [
        {"name": "m", "kind": "monomial", "E": "R2", "F": "F", "xi": "xi", "chi": "chi"},
        {"name": "m3", "kind": "monomial", "E": "U3", "F": "F", "xi": "xi3"},
        {"name": "g", "kind": "phi", "of": "m"},
    ],
    "tasks": [
        {"id": "lam", "op": "lambda_tame", "args": {"E": "U3", "F": "F"}},
        {"id": "cond", "op": "conductor", "args": {"character": "xi"}},
        {"id": "tate", "op": "tate_epsilon", "args": {"character": "chi"}},
        {"id": "phi", "op": "phi_forward", "args": {"param": "m"}},
        {"id": "eps", "op": "gl_epsilon", "args": {"param": "g"}},
        {"id": "lift", "op": "base_change", "args": {"param": "g", "field": "U3"}},
        {"id": "pair", "op": "pair_epsilon", "args": {"pi1": "g", "m2": "m3"}},
        {"id": "pair-w1", "op": "pair_epsilon", "args": {"pi1": "g", "m2": "m3"}, "options": {"w": 1}},
    ],
}


def _write(tmp_path, spec, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(spec))
    return str(path)


def _main(args, capsys):
    code = cli.main(args)
    return code, capsys.readouterr().out


def test_run_report(tmp_path, capsys):
    code, out = _main(["run", _write(tmp_path, BASE)], capsys)
    assert code == 0
    report = json.loads(out)
    tasks = {t["id"]: t for t in report["tasks"]}
    assert tasks["lam"]["result"]["constant"]["terms"] == [[0, "1/1"]]
    assert tasks["cond"]["result"]["conductor"] == 2
    assert tasks["phi"]["result"]["determinant_matches_central_character"]
    assert tasks["eps"]["trace"][0]["branch"] == "even"
    assert tasks["pair"]["trace"][0]["lambda_exponent"] == 2
    assert tasks["pair-w1"]["trace"][0]["lambda_exponent"] == 1
    assert [g["character"] for g in report["unit_groups"]] == ["xi", "xi3", "chi"]
    assert report["unit_groups"][0]["orders"] == [4, 5]
    assert tasks["eps"]["inputs"] == BASE["tasks"][4]


def test_exact_values_roundtrip(tmp_path, capsys):
    from locfac.cyclo import CycloNumber
    _, out = _main(["run", _write(tmp_path, BASE)], capsys)
    eps = json.loads(out)["tasks"][4]["result"]["epsilon"]
    c = CycloNumber.from_json(eps["constant"])
    assert abs(c.embed() - complex(*eps["constant"]["approx"])) < 1e-9
    assert c * c.conj() == 1


def test_determinism_and_workers(tmp_path):
    spec = _write(tmp_path, BASE)
    outs = []
    for i, workers in enumerate((1, 1, 3)):
        out = tmp_path / f"r{i}.json"
        assert cli.main(["run", spec, "--out", str(out), "--workers", str(workers)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


@pytest.mark.parametrize("mutate, code, status", [
    (lambda s: s["tasks"].append({"id": "x", "op": "gauss_sum", "args": {"character": "nope"}}), "unresolved-ref", 2),
    (lambda s: s["params"].append({"name": "loop", "kind": "phi", "of": "loop"}), "cyclic-ref", 2),
    (lambda s: s["tasks"].append({"id": "x", "op": "frobnicate"}), "unknown-op", 2),
    (lambda s: s["tasks"][0].update(options={"sign_convention": "+"}), "invalid-option", 2),
    (lambda s: s["characters"].append({"name": "big", "field": "U3", "conductor": 9, "images": []}), "guard-limit", 3),
    (lambda s: s["extensions"].append({"name": "bad", "kind": "eisenstein", "over": "F", "poly": "x^2-25"}),
     "invalid-field", 2),
])
def test_error_codes(tmp_path, capsys, mutate, code, status):
    spec = json.loads(json.dumps(BASE))
    mutate(spec)
    rc, out = _main(["run", _write(tmp_path, spec)], capsys)
    assert rc == status
    assert json.loads(out)["error"]["code"] == code


def test_bad_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{")
    rc, out = _main(["run", str(path)], capsys)
    assert rc == 2 and json.loads(out)["error"]["code"] == "invalid-json"


def test_print_generators(tmp_path, capsys):
    rc, out = _main(["print-generators", _write(tmp_path, BASE), "R2", "3"], capsys)
    assert rc == 0
    data = json.loads(out)
    assert data["orders"] == [4, 5, 5]
    assert len(data["generators"]) == 3


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "locfac.cli", "run", _write(tmp_path, BASE)],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schema"] == cli.SCHEMA


@pytest.fixture(scope="module")
def small_report():
    return cli.selfcheck("small")


def test_selfcheck_small(small_report):
    assert small_report["passed"], small_report["lines"]
    assert small_report["coverage"]["complete"]
    assert set(small_report["coverage"]["branches"]) >= set(BRANCHES)
    assert sum(r["seconds"] for r in small_report["suites"]) < 300


def test_selfcheck_fault_injection(small_report):
    faulty = cli.selfcheck("small", faults=("lambda",))
    status = {r["name"]: r["passed"] for r in faulty["suites"]}
    assert status.pop("lambda closed forms") is False
    assert all(status.values())
    assert not faulty["passed"]
