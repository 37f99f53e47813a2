import io
import json

import numpy as np
import pytest

from quasilie.catalog import get_model
from quasilie.cli import EXIT_FAIL, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from quasilie.dynamics import Trajectory


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("models")
    paths = {}
    for name in ("milne-pinney-demo", "milne-pinney-broken", "riccati", "nonlinear-oscillator", "emden"):
        paths[name] = d / f"{name}.json"
        assert run("catalog", "emit", name, "--out", paths[name])[0] == EXIT_OK
    return paths


def test_catalog_list():
    code, out, _ = run("catalog", "list")
    assert code == EXIT_OK
    assert "riccati" in out and "emden" in out


def test_usage_errors(files, tmp_path):
    assert run()[0] == EXIT_USAGE
    assert run("frobnicate")[0] == EXIT_USAGE
    assert run("scheme", "check", tmp_path / "nope.json")[0] == EXIT_USAGE
    assert run("catalog", "emit", "nope", "--out", tmp_path / "x.json")[0] == EXIT_USAGE
    assert run("verify", "superposition", files["riccati"], "--rule", "nope")[0] == EXIT_USAGE
    assert run("bracket", files["riccati"], "--left", "1", "--right", "9")[0] == EXIT_USAGE
    assert run("transform", files["riccati"])[0] == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    code, _, err = run("scheme", "check", bad)
    assert code == EXIT_USAGE and err


def test_scheme_check_json(files):
    code, out, _ = run("scheme", "check", files["milne-pinney-demo"], "--json")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["w_in_v"] and d["w_closed"] and d["normalizes"]


def test_bracket(files):
    code, out, _ = run("bracket", files["riccati"], "--left", "Y0", "--right", "3", "--json")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["in_span"]
    assert d["coefficients"] == {"Y0": "0", "Y1": "2", "Y2": "0"}


def test_transform_compare_numeric(files):
    code, out, _ = run("transform", files["milne-pinney-demo"], "--compare-numeric", "--json")
    assert code == EXIT_OK
    d = json.loads(out)
    assert set(d["coefficients"]) == {"X1", "X2", "X3", "X4", "X5"}


def test_verify_invariants_pass_and_fail(files):
    code, out, _ = run("verify", "invariants", files["milne-pinney-demo"], "--json")
    assert code == EXIT_OK
    reps = json.loads(out)
    assert reps and all(r["pass"] for r in reps)
    code, out, _ = run("verify", "invariants", files["milne-pinney-broken"], "--json")
    assert code == EXIT_FAIL
    assert not all(r["pass"] for r in json.loads(out))


def test_verify_invariants_text(files):
    code, out, _ = run("verify", "invariants", files["emden"], "--samples", "50")
    assert code == EXIT_OK
    assert "PASS" in out


def test_verify_invariants_threshold_override(files):
    code, _, _ = run("verify", "invariants", files["milne-pinney-demo"], "--threshold", "1e-15")
    assert code == EXIT_FAIL


def test_verify_superposition(files):
    code, out, _ = run("verify", "superposition", files["riccati"], "--rule", "cross-ratio", "--json")
    assert code == EXIT_OK
    assert all(r["pass"] for r in json.loads(out))
    code, _, _ = run("verify", "superposition", files["milne-pinney-demo"], "--rule", "pinney")
    assert code == EXIT_OK


def test_verify_laws(files):
    code, out, _ = run("verify", "laws", files["nonlinear-oscillator"], "--json")
    assert code == EXIT_OK
    assert all(r["pass"] for r in json.loads(out))


def test_integrate_csv_round_trip(files, tmp_path):
    csv_path = tmp_path / "traj.csv"
    code, _, _ = run("integrate", files["milne-pinney-demo"], "--state", "1", "--out", csv_path)
    assert code == EXIT_OK
    back = Trajectory.from_csv(csv_path)
    direct = get_model("milne-pinney-demo").integrate(1)
    # 17 significant digits survive the text round trip bit for bit
    assert np.array_equal(back.times, direct.times)
    assert np.array_equal(back.states, direct.states)
    header = csv_path.read_text().splitlines()[0]
    assert header == "t,x1,x2"


def test_integrate_numeric_failure(files, tmp_path):
    code, _, err = run("integrate", files["milne-pinney-demo"], "--t1", "100", "--out", tmp_path / "f.csv")
    assert code == EXIT_NUMERIC
    assert err


def test_integrate_bad_state(files, tmp_path):
    assert run("integrate", files["riccati"], "--state", "42", "--out", tmp_path / "g.csv")[0] == EXIT_USAGE
