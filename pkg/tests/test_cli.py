import json

import pytest

from varpick.cli import load_pair, load_poly, load_problem, main
from varpick.errors import SchemaError
from varpick.kernels import neil_standard_pairs
from varpick.variety import neil_spec


@pytest.fixture
def files(tmp_path):
    spec = neil_spec()
    poly = tmp_path / "neil.json"
    poly.write_text(json.dumps(spec.p.to_json()))
    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps(neil_standard_pairs(spec)["neil-2"].to_json()))
    fail = tmp_path / "fail.json"
    fail.write_text(json.dumps({"nodes": [[[0, 0], [0, 0]], [[0.25, 0], [0.125, 0]]],
                                "targets": [[0.9, 0], [0, 0]], "rho": 1.0}))
    ok = tmp_path / "ok.json"
    ok.write_text(json.dumps({"nodes": [[[0.09, 0], [0.027, 0]], [[0.25, 0], [0.125, 0]]],
                              "targets": [[0.027, 0], [0.125, 0]]}))
    return tmp_path, poly, pair, fail, ok


def test_loaders(files):
    tmp, poly, pair, fail, _ = files
    p = load_poly(poly)
    assert p.bidegree == (3, 2)
    pr = load_pair(pair, neil_spec())
    assert pr.alpha == 1 and pr.Q.shape == (1, 2)
    prob = load_problem(fail, neil_spec())
    assert len(prob.nodes) == 2


def test_loader_errors(files):
    tmp = files[0]
    bad = tmp / "ragged.json"
    bad.write_text(json.dumps({"zdeg": 1, "wdeg": 1, "coeffs": [[[1, 0], [0, 0]], [[1, 0]]]}))
    with pytest.raises(SchemaError):
        load_poly(bad)
    big = tmp / "big.json"
    big.write_text(json.dumps({"nodes": [[[0.25, 0], [0.125, 0]]], "targets": [[1.0, 0]]}))
    with pytest.raises(SchemaError) as exc:
        load_problem(big, neil_spec())
    assert exc.value.path == "/targets/0"
    off = tmp / "off.json"
    off.write_text(json.dumps({"nodes": [[[0.25, 0], [0.5, 0]]], "targets": [[0.1, 0]]}))
    with pytest.raises(SchemaError):
        load_problem(off, neil_spec())


def test_exit_codes(files, tmp_path, capsys):
    _, poly, pair, fail, ok = files
    out = tmp_path / "r.json"
    assert main(["variety", "check", "--poly", str(poly)]) == 0
    lin = tmp_path / "lin.json"
    lin.write_text(json.dumps({"zdeg": 1, "wdeg": 1, "coeffs": [[[0, 0], [-1, 0]], [[2, 0], [0, 0]]]}))
    assert main(["variety", "check", "--poly", str(lin)]) == 1
    assert main(["pick", "test", "--poly", str(poly), "--problem", str(fail), "--json", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["verdict"] == "fail" and report["results"]["witness"] == "neil-1"
    assert main(["pick", "test", "--problem", str(ok), "--grid", "16"]) == 0
    assert main(["pair", "validate", "--pair", str(pair), "--samples", "20"]) == 0
    assert main(["bogus"]) == 2
    assert main(["pick", "test"]) == 2
    assert main(["variety", "check", "--poly", str(tmp_path / "missing.json")]) == 2


def test_truncated_pair_exit(files, tmp_path):
    _, poly, pair, _, _ = files
    obj = json.loads(pair.read_text())
    obj["P"]["entries"][0][0] = {"zdeg": 0, "wdeg": 0, "coeffs": [[[0, 0]]]}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    out = tmp_path / "r.json"
    assert main(["pair", "validate", "--pair", str(bad), "--json", str(out)]) == 1
    assert json.loads(out.read_text())["results"]["bad.json"]["witness"]


def test_transfer_and_dilation(files, tmp_path):
    _, poly, pair, _, _ = files
    col = tmp_path / "col.json"
    assert main(["transfer", "synth", "--poly", str(poly), "--pair", str(pair), "--out", str(col)]) == 0
    assert set(json.loads(col.read_text())) >= {"A", "B", "C", "D"}
    assert main(["dilation", "verify", "--pair", str(pair), "--samples", "30", "--seed", "3"]) == 0
    assert main(["correctors", "demo", "--n", "10,100,1000"]) == 0


def test_demo_neil():
    assert main(["demo", "neil"]) == 0


def test_determinism(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["pair", "validate", "--seed", "4", "--json", str(a)])
    monkeypatch.setenv("VARPICK_SEED", "4")
    main(["pair", "validate", "--seed", "9", "--json", str(b)])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("wallTime"), rb.pop("wallTime")
    assert ra == rb
