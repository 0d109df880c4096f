import json
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from cusp_certify import cli, verify
from cusp_certify.bounds import BoundInputs, bound_report
from cusp_certify.hermitian import matrix_to_json

SYNTH = str(resources.files("cusp_certify").joinpath("data", "synthetic-2.json"))


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_classify_outputs(tmp_path, capsys):
    f = write(tmp_path, "d.json", matrix_to_json(np.diag([2, 1, 0.5])))
    assert cli.main(["classify", f]) == 0
    out = capsys.readouterr().out
    assert out.startswith("hyperbolic r=2.000000") and "length=2.032696" in out
    f = write(tmp_path, "i.json", {"matrix": matrix_to_json(np.eye(3))})
    assert cli.main(["classify", f]) == 0
    assert capsys.readouterr().out.startswith("elliptic")


def test_classify_error_codes(tmp_path, capsys):
    f = write(tmp_path, "bad.json", matrix_to_json(np.diag([2, 1, 1])))
    assert cli.main(["classify", f]) == 2
    assert "residual" in capsys.readouterr().err
    f = tmp_path / "junk.json"
    f.write_text("{not json")
    assert cli.main(["classify", str(f)]) == 1
    assert cli.main(["classify", str(tmp_path / "missing.json")]) == 1
    f = write(tmp_path, "ragged.json", [[[1, 0]], [[0, 0], [1, 0]]])
    assert cli.main(["classify", f]) == 1
    f = write(tmp_path, "d.json", matrix_to_json(np.diag([2, 1, 0.5])))
    assert cli.main(["classify", f, "--tol", "3"]) == 3


def test_classify_certificate(tmp_path, capsys):
    f = write(tmp_path, "d.json", matrix_to_json(np.diag([2, 1, 0.5])))
    cert = tmp_path / "c.json"
    assert cli.main(["classify", f, "--cert", str(cert)]) == 0
    doc = json.loads(cert.read_text())
    assert doc["command"] == "classify" and doc["results"]["kind"] == "hyperbolic"


def test_ball_outputs_and_determinism(tmp_path):
    outs = []
    for k in ("1", "8"):
        out = tmp_path / f"b{k}.json"
        assert cli.main(["ball", SYNTH, "--length", "2", "--threads", k, "--out", str(out)]) == 0
        outs.append(json.loads(out.read_text()))
    a, b = outs
    assert a["results"] == b["results"] and a["resultsDigest"] == b["resultsDigest"]
    assert a["results"]["sysUpperEstimate"] <= 2.032790
    assert "sysUpperEstimate" in a["oneSidednessFlags"]


def test_ball_threads_from_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CUSP_CERTIFY_THREADS", "4")
    assert cli.default_threads() == 4
    out = tmp_path / "b.json"
    assert cli.main(["ball", SYNTH, "--length", "1", "--out", str(out)]) == 0
    monkeypatch.setenv("CUSP_CERTIFY_THREADS", "zero")
    assert cli.main(["ball", SYNTH, "--length", "1", "--out", str(out)]) == 1


def test_ball_usage_errors(capsys):
    assert cli.main(["ball", SYNTH, "--length", "0"]) == 1
    assert cli.main(["ball", SYNTH, "--length", "13"]) == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["ball", SYNTH])
    assert info.value.code == 1


def test_ball_cap_and_resume(tmp_path, capsys):
    out = tmp_path / "b.json"
    part = tmp_path / "p.json"
    assert cli.main(["ball", SYNTH, "--length", "3", "--cap", "30", "--out", str(out), "--partial", str(part)]) == 4
    assert str(part) in capsys.readouterr().err
    doc = json.loads(part.read_text())
    assert doc["partial"] is True and doc["resumeToken"]["completedLength"] == 2
    assert cli.main(["ball", SYNTH, "--length", "3", "--resume", str(part), "--out", str(out)]) == 0
    full = tmp_path / "f.json"
    assert cli.main(["ball", SYNTH, "--length", "3", "--out", str(full)]) == 0
    assert json.loads(out.read_text())["results"] == json.loads(full.read_text())["results"]


def test_bounds_json_round_trip(capsys):
    args = ["bounds", "--n", "2", "--sys", "258", "--s", "1", "--sysD", "3"]
    assert cli.main(args) == 0
    doc = json.loads(capsys.readouterr().out)
    assert all(doc["results"]["certified"].values())
    ref = bound_report(BoundInputs(2, 258.0, 1, 1, 3.0)).to_json()
    assert doc["results"] == json.loads(json.dumps(ref))


def test_bounds_text_and_flags(capsys):
    assert cli.main(["bounds", "--n", "2", "--sys", "10", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "NOT certified" in out and "volumeLowerBound" in out


def test_bounds_usage_errors():
    assert cli.main(["bounds", "--n", "2", "--sys", "10", "--m", "3"]) == 1
    assert cli.main(["bounds", "--n", "2", "--sys", "-1"]) == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["bounds", "--n", "two", "--sys", "10"])
    assert info.value.code == 1


def test_certificate_reproducible(capsys):
    cli.main(["bounds", "--n", "3", "--sys", "100"])
    a = json.loads(capsys.readouterr().out)
    cli.main(["bounds", "--n", "3", "--sys", "100"])
    b = json.loads(capsys.readouterr().out)
    assert a["resultsDigest"] == b["resultsDigest"] and a["inputsDigest"] == b["inputsDigest"]


def test_verify_pass(capsys, tmp_path):
    out = tmp_path / "v.json"
    assert cli.main(["verify", "--suite", "trace", "--seed", "3", "--out", str(out)]) == 0
    assert "suite trace: PASS" in capsys.readouterr().out
    assert json.loads(out.read_text())["parameters"]["seed"] == 3


def test_verify_mismatch_writes_reproduction(tmp_path, monkeypatch, capsys):
    def broken(seed):
        res = verify.SuiteResult("trace", seed)
        res.add("planted mismatch", False, "forced", {"x": 1})
        return res

    monkeypatch.setitem(verify.SUITES, "trace", broken)
    assert cli.main(["verify", "--suite", "trace", "--repro-dir", str(tmp_path)]) == 5
    repro = json.loads((tmp_path / "repro-trace-seed0.json").read_text())
    assert repro["check"] == "planted mismatch" and repro["fixture"] == {"x": 1}
    assert "planted mismatch" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "i.json", matrix_to_json(np.eye(3)))
    r = subprocess.run([sys.executable, "-m", "cusp_certify", "classify", f], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("elliptic")
    r = subprocess.run([sys.executable, "-m", "cusp_certify", "frobnicate"], capture_output=True, text=True)
    assert r.returncode == 1
