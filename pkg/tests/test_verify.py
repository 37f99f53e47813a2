import math

import pytest

from quasilie.catalog import get_model
from quasilie.catalog.rules import cross_ratio_phi
from quasilie.dynamics import IntegratorConfig, integrate_ivp
from quasilie.errors import BranchCrossing, DimensionMismatch, DomainError
from quasilie.flows import AffineFlow2D, identity_flow, invert
from quasilie.timedep.tdfield import NumericField
from quasilie.verify import (
    DriftReport,
    Observable,
    SuperpositionRule,
    invariant_drift,
    reports_to_json,
    verify_flow_laws,
    verify_superposition,
)


def oscillator(t, y):
    return [y[1], -y[0]]


def test_constant_observable_has_zero_drift():
    traj = integrate_ivp(oscillator, 0, 3, [1.0, 0.0])
    rep = invariant_drift(traj, Observable(lambda t, x: 2.5, "c"))
    assert rep.max_abs_drift == 0 and rep.passed


def test_energy_drift_and_report_fields():
    traj = integrate_ivp(oscillator, 0, 10, [1.0, 0.5])
    I = Observable.from_expression("x^2 + v^2", ["x", "v"], name="E")
    rep = invariant_drift(traj, I, samples=50)
    assert rep.max_rel_drift < 1e-9
    d = rep.to_dict()
    assert set(d) >= {"name", "max_abs_drift", "max_rel_drift", "argmax_t", "pass"}
    assert rep.samples == 50


def test_pinney_equilibrium_invariant():
    # (xb v - vb x)^2 + k (xb/x)^2 with x = 1, v = 0, xb = cos t, vb = -sin t
    def f(t, z):
        x, v, xb, vb = z
        return [v, -x + 1 / x ** 3, vb, -xb]

    traj = integrate_ivp(f, 0, 10, [1.0, 0.0, 1.0, 0.0])
    I = Observable.from_expression("(xb*v - vb*x)^2 + (xb/x)^2", ["x", "v", "xb", "vb"])
    rep = invariant_drift(traj, I)
    assert rep.reference_value == 1.0
    assert rep.max_abs_drift <= 1e-9


def test_observable_domain_error():
    I = Observable.from_expression("1/x", ["x"])
    with pytest.raises(DomainError):
        I(0.0, [0.0])


def test_identity_rule():
    traj = integrate_ivp(oscillator, 0, 2, [1.0, 0.0])
    rule = SuperpositionRule("identity", 1, lambda t, xs, k, s: list(xs[0]))
    rep = verify_superposition(rule, [traj], traj)
    assert rep.max_abs_drift == 0


def test_rule_arity_checked():
    traj = integrate_ivp(oscillator, 0, 2, [1.0, 0.0])
    rule = SuperpositionRule("pair", 2, lambda t, xs, k, s: list(xs[0]))
    with pytest.raises(DimensionMismatch):
        verify_superposition(rule, [traj], traj)


def test_pinney_rule_on_equilibrium():
    model = get_model("milne-pinney-equilibrium")
    (rep,) = model.rule("pinney").run(model)
    assert rep.extra["constants"] == pytest.approx([0.5, 0.5])
    assert rep.max_abs_drift <= 1e-8


def test_branch_choices_are_consistent():
    model = get_model("milne-pinney-demo")
    rule = model.rule("pinney")
    auto = rule.run(model, sign_choice="auto")
    chosen = [r.extra["branch"] for r in auto]
    assert set(chosen) == {"plus", "minus"}
    for r, branch in zip(auto, chosen):
        idx = int(r.name.split()[-1].rstrip("]"))
        rule.reference_states = [idx]
        (same,) = rule.run(model, sign_choice=branch)
        other = "minus" if branch == "plus" else "plus"
        (wrong,) = rule.run(model, sign_choice=other)
        assert same.max_abs_drift == r.max_abs_drift
        assert wrong.max_abs_drift > 1e-3


def test_branch_crossing_is_raised():
    traj = integrate_ivp(lambda t, y: [1.0], 0, 2, [0.0])
    rule = SuperpositionRule("sqrt", 1, lambda t, xs, k, s: [xs[0][0]],
                             discriminant=lambda t, xs, k: 1.0 - xs[0][0])
    with pytest.raises(BranchCrossing):
        verify_superposition(rule, [traj], traj)


def test_superposition_error_scales_with_tolerance():
    model = get_model("milne-pinney-demo")
    rule = model.rule("pinney")
    loose = max(r.max_abs_drift for r in rule.run(model, IntegratorConfig(1e-6, 1e-8)))
    tight = max(r.max_abs_drift for r in rule.run(model, IntegratorConfig(1e-8, 1e-10)))
    assert tight * 10 <= loose


def test_cross_ratio_phi_inverts_cross_ratio():
    from quasilie.catalog.rules import cross_ratio
    x1, x2, x3, x = 0.1, 0.7, -0.4, 0.33
    k = cross_ratio(x, x1, x2, x3)
    assert cross_ratio_phi(0, [[x1], [x2], [x3]], (k,))[0] == pytest.approx(x, rel=1e-14)


def test_identity_flow_laws():
    X = NumericField(lambda t, x: [x[1], -x[0] + math.sin(t)], 2)
    e = identity_flow(2)
    grid = [(t, [x, 0.3]) for t in (0.0, 0.5, 1.0) for x in (0.5, 1.0)]
    rep = verify_flow_laws(e, e, X, grid, threshold=1e-12)
    assert rep.passed, rep.discrepancies


def test_flow_laws_on_emden_field():
    model = get_model("emden")
    g = AffineFlow2D("exp(t/3)", "sin(t)/2", "1 + t^2/5")
    h = AffineFlow2D("1 + t/4", "t/5", "exp(-t/7)")
    grid = [(t, s) for t in (0.0, 0.7, 1.4) for s in model.initial_states[:3]]
    assert verify_flow_laws(g, h, model.system, grid).passed


def test_inverse_flow_law():
    model = get_model("emden")
    g = AffineFlow2D("exp(t/3)", "sin(t)/2", "1 + t^2/5")
    grid = [(t, s) for t in (0.0, 0.7) for s in model.initial_states[:2]]
    rep = verify_flow_laws(g, invert(g), model.system, grid)
    assert rep.passed


def test_reports_json():
    r = DriftReport("a", 1e-9, 1e-9, 0.5, 10, 1.0, 1e-6)
    import json
    assert json.loads(reports_to_json([r]))[0]["pass"] is True
