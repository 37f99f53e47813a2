import json
import math
from fractions import Fraction

import pytest

from quasilie.catalog import (
    CATALOG,
    build_emden,
    build_mathews_lakshmanan,
    build_milne_pinney,
    build_nonlinear_oscillator,
    build_perelomov,
    build_riccati,
    emden_relation,
    get_model,
    load_model,
    model_from_dict,
    save_model,
)
from quasilie.errors import ModelFileError, NotASolution, WindowError, ZeroCrossing
from quasilie.fields import is_lie_algebra
from quasilie.timedep.functions import CallableFunction


@pytest.mark.parametrize("name", list(CATALOG))
def test_every_catalog_model_is_a_scheme(name):
    model = get_model(name)
    assert model.scheme_report().passed
    if model.target is not None:
        assert is_lie_algebra(model.target).is_lie


@pytest.mark.parametrize("name", [n for n in CATALOG if n != "milne-pinney-broken"])
def test_catalog_invariants_hold(name):
    for rep in get_model(name).invariant_reports():
        assert rep.max_rel_drift <= 1e-6, rep.line()


def test_pinney_c_from_integrability_condition():
    m = build_milne_pinney(0, -1, 1)
    assert m.references["c"](1.3) == pytest.approx(1.0)
    m = build_milne_pinney(0, 0, 1)
    assert [f(0.4) for f in m.system.coefficients] == pytest.approx([0, 1, 1, 0, 0])
    m = build_milne_pinney("1/5", -1, 1)
    assert m.references["c"](2.0) == pytest.approx(math.exp(0.8), rel=1e-14)
    assert m.control().alpha(2.0) == pytest.approx(math.exp(0.4), rel=1e-14)


def test_pinney_rejects_zero_k():
    with pytest.raises(ValueError):
        build_milne_pinney(0, -1, 0)


def test_pinney_negative_control_drifts():
    reps = get_model("milne-pinney-broken").invariant_reports()
    assert max(r.max_rel_drift for r in reps) >= 1e-2
    assert get_model("milne-pinney-broken").flags["integrability condition"] is False


def test_pinney_with_bound_coefficient_matches_expression():
    a = CallableFunction(lambda t: 0.2)
    m = build_milne_pinney(a, -1, 1)
    ref = build_milne_pinney("1/5", -1, 1)
    assert m.references["c"](1.5) == pytest.approx(ref.references["c"](1.5), rel=1e-12)
    assert max(r.max_rel_drift for r in m.invariant_reports()) <= 1e-6
    with pytest.raises(ModelFileError):
        m.to_dict()


def test_oscillator_c_and_flags():
    m = build_nonlinear_oscillator(1, 2, 1, "exp(t)")
    assert m.references["c"](0.7) == pytest.approx(math.exp(-3.5), rel=1e-14)
    assert m.flags["control gamma1 in G(W)"] is False
    m = build_nonlinear_oscillator(1, 2, 1, "(exp(t) + exp(-t))/2")
    assert m.flags["control gamma1 in G(W)"] is True


def test_autonomous_oscillator_energy():
    m = build_nonlinear_oscillator(0, 2, "1/2", "1", initial_states=[[0.5, 0.4], [0.3, 0.2]])
    assert m.references["c"](3.0) == 0.5
    I = next(i for i in m.invariants if i.name == "I")
    assert I.observable(0.0, [0.5, 0.4]) == pytest.approx(0.5 * 0.16 - 0.5 * 0.125 / 3)


def test_oscillator_gamma_checks():
    with pytest.raises(NotASolution):
        build_nonlinear_oscillator(1, 2, 1, "1 + t")
    with pytest.raises(ZeroCrossing):
        build_nonlinear_oscillator(1, 2, 1, "exp(t) - 2*exp(-t)")


def test_oscillator_i3_present_with_positive_c0_only():
    names = [i.name for i in get_model("nonlinear-oscillator").invariants]
    assert "I3" in names
    assert "I3" not in [i.name for i in get_model("perelomov").invariants]


def test_perelomov_coefficients():
    m = build_perelomov(1, 4, "1/2", "cos(t)")
    t = 0.6
    # c(t) = -s c^2 gamma^-(s+2)
    assert m.references["c"](t) == pytest.approx(-4 * 0.25 * math.cos(t) ** -6, rel=1e-13)
    assert m.system.coefficients[0](t) == pytest.approx(-1.0)


def test_emden_constructed_functions():
    m = build_emden(0, 2)
    assert m.references["b"].eval_exact(0) == Fraction(-4)
    assert m.references["gamma"].eval_exact(0) == 1
    assert m.control().alpha(0.0) == 4.0
    assert m.flags["control emden in G(W)"] is False
    t = 0.9
    assert m.references["b"](t) == pytest.approx(-4 / (1 + 2 * t) ** 2.5, rel=1e-14)


def test_emden_b0_for_nonconstant_a():
    m = build_emden("sin(t)", 3)
    assert m.references["b"].eval_exact(0) == -4
    assert max(r.max_rel_drift for r in m.invariant_reports()) <= 1e-6


def test_emden_window_error():
    with pytest.raises(WindowError):
        build_emden(0, 2, window=(-1, 1))


def test_emden_relation_constancy():
    m = get_model("emden")
    assert not emden_relation(m, "printed").passed
    assert emden_relation(m, "consistent").passed


def test_mathews_lakshmanan_autonomous():
    m = build_mathews_lakshmanan(0, 1, initial_states=[[0.0, 0.0], [0.3, 0.1]])
    assert m.references["omega"](2.0) == -1.0
    rep = m.invariant_reports()[0]
    assert rep.reference_value == 1.0 and rep.max_abs_drift == 0.0


def test_mathews_lakshmanan_omega():
    m = build_mathews_lakshmanan("-1/10", 1)
    assert m.references["omega"](3.0) == pytest.approx(-math.exp(-0.6), rel=1e-14)
    with pytest.raises(ValueError):
        build_mathews_lakshmanan(0, -1)


def test_riccati_translation():
    m = build_riccati(1, 0, 0, initial_states=[[0.5]])
    assert m.integrate(0).dense(0.75)[0] == pytest.approx(1.25, abs=1e-12)
    assert is_lie_algebra(m.V).is_lie


def test_riccati_rule():
    m = get_model("riccati")
    reps = m.rule("cross-ratio").run(m)
    assert reps and all(r.max_rel_drift <= 1e-7 for r in reps)


@pytest.mark.parametrize("name", ["milne-pinney-demo", "emden", "nonlinear-oscillator"])
def test_json_round_trip(name, tmp_path):
    m = get_model(name)
    path = tmp_path / "m.json"
    save_model(m, path)
    again = load_model(path)
    assert again.to_dict() == m.to_dict()
    a = [r.max_abs_drift for r in m.invariant_reports()]
    b = [r.max_abs_drift for r in again.invariant_reports()]
    assert a == b


def test_model_file_errors(tmp_path):
    good = get_model("riccati").to_dict()
    for key in ("basis", "window"):
        d = dict(good)
        del d[key]
        with pytest.raises(ModelFileError):
            model_from_dict(d)
    d = dict(good, coefficients=["b0(t)", "b1(t) +", "b2(t)"])
    with pytest.raises(ModelFileError):
        model_from_dict(d)
    d = dict(good, coefficients=["q(t)", "0", "0"])
    with pytest.raises(ModelFileError):
        model_from_dict(d)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelFileError):
        load_model(bad)
    with pytest.raises(ModelFileError):
        load_model(tmp_path / "missing.json")
    with pytest.raises(ModelFileError):
        get_model("unknown")


def test_emitted_json_is_plain(tmp_path):
    path = tmp_path / "e.json"
    save_model(get_model("emden"), path)
    d = json.loads(path.read_text())
    assert d["w_indices"] == [3, 0, 4]
    assert d["references"]["B"]["base_value"] == "1/2"
