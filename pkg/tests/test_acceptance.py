"""Acceptance criteria, one test each; the terminal summary prints a line per criterion."""
import io
import json
import math
import random
from fractions import Fraction

import numpy as np

from quasilie.algebra import Polynomial
from quasilie.bases import affine_basis, affine_w, ml_basis
from quasilie.catalog import (
    build_mathews_lakshmanan,
    build_milne_pinney,
    build_nonlinear_oscillator,
    emden_relation,
    gauss_2f1,
    get_model,
    load_model,
    save_model,
)
from quasilie.cli import EXIT_FAIL, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from quasilie.dynamics import Trajectory
from quasilie.fields import Coefficients, FieldSpace, SymbolicVectorField, check_scheme, decompose_in_span, \
    is_lie_algebra, lie_bracket
from quasilie.flows import AffineFlow2D, flow_of, inverse_field, invert, push_forward_affine_closed_form, \
    push_forward_numeric, right_log_derivative
from quasilie.timedep.tdfield import NumericField
from quasilie.verify import verify_flow_laws

SEED = 20240607


def _crit(record_property, label, detail):
    record_property("criterion", label)
    record_property("detail", detail)


def _coeffs(Z, S):
    d = decompose_in_span(Z, S)
    assert isinstance(d, Coefficients), d
    return tuple(d)


def _unit(i, c=1):
    return tuple(Fraction(c) if j == i else 0 for j in range(5))


def test_1_exact_brackets(record_property):
    checked = 0
    for n in (2, -3):
        V, W = affine_basis(n), affine_w(n)
        Y1, Y2, Y3 = W[0], W[1], W[2]
        X2, X3 = V[1], V[2]
        table = [
            (Y1, Y2, W, (0, -1, 0)), (Y1, Y3, W, (0, 0, 0)), (Y2, Y3, W, (0, -1, 0)),
            (Y1, X2, V, _unit(1, -1)), (Y1, X3, V, _unit(2)), (Y2, X2, V, (0,) * 5),
            (Y2, X3, V, (0, 0, 0, -1, 1)), (Y3, X2, V, _unit(1, n)), (Y3, X3, V, _unit(2, -1)),
        ]
        for A, B, S, want in table:
            assert _coeffs(lie_bracket(A, B), S) == want
            checked += 1
    M = ml_basis(1)
    assert _coeffs(lie_bracket(M[2], M[0]), M) == (1, 0, 0)
    assert _coeffs(lie_bracket(M[2], M[1]), M) == (0, -1, 0)
    checked += 2
    _crit(record_property, "1 exact bracket suite", f"{checked} relations exact")


def _random_field(rng, variables):
    comps = []
    for _ in variables:
        terms = {}
        for _ in range(rng.randint(0, 4)):
            exps = tuple(rng.randint(0, 3) for _ in variables)
            if sum(exps) <= 3:
                terms[exps] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        comps.append(Polynomial(variables, terms))
    return SymbolicVectorField(variables, comps)


def test_2_scheme_gates(record_property):
    assert check_scheme(affine_w(2), affine_basis(2)).passed
    assert check_scheme(affine_w(-3), affine_basis(-3)).passed
    M = ml_basis(1)
    assert check_scheme(FieldSpace([M[2]], names=["X3"]), M).passed
    res = is_lie_algebra(affine_basis(2))
    assert not res.is_lie and res.witness == (1, 2)
    rng = random.Random(SEED)
    for _ in range(50):
        variables = ("x", "y", "z")[: rng.randint(1, 3)]
        X, Y, Z = (_random_field(rng, variables) for _ in range(3))
        total = (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
                 + lie_bracket(Z, lie_bracket(X, Y)))
        assert total.is_zero()
    _crit(record_property, "2 scheme gates", "schemes pass, V not Lie at (X2, X3), Jacobi exact on 50 triples")


def test_3_pushforward_consistency(record_property):
    rng = random.Random(SEED)
    systems = [get_model("milne-pinney-demo").system, get_model("nonlinear-oscillator").system]
    ts = np.linspace(0.0, 2.0, 10)
    xs = np.linspace(0.5, 1.5, 10)
    vs = np.linspace(-1.0, 1.0, 10)
    worst = 0.0
    for _ in range(3):
        a0, a1 = rng.uniform(0.5, 2), rng.uniform(-0.5, 0.5)
        b0, b1 = rng.uniform(-1, 1), rng.uniform(0.5, 2)
        c0, c1 = rng.uniform(0.5, 2), rng.uniform(0, 0.5)
        h = AffineFlow2D(f"{a0:.6f}*exp({a1:.6f}*t)", f"{b0:.6f}*sin({b1:.6f}*t)", f"{c0:.6f} + {c1:.6f}*t^2")
        for X in systems:
            closed = push_forward_affine_closed_form(h, X)
            numeric = push_forward_numeric(h, X)
            for t in ts:
                for x in xs:
                    for v in vs:
                        y = [float(x), float(v)]
                        d = np.max(np.abs(np.asarray(closed(float(t), y)) - np.asarray(numeric(float(t), y))))
                        worst = max(worst, float(d))
    assert worst <= 1e-6
    _crit(record_property, "3 pushforward consistency", f"sup error {worst:.3e} (3 controls x 2 fields x 1000 points)")


def test_4_law_suite(record_property):
    model = get_model("emden")
    g = AffineFlow2D("exp(t/3)", "sin(t)/2", "1 + t^2/5")
    h = AffineFlow2D("1 + t/4", "t/5", "exp(-t/7)")
    grid = [(t, s) for t in (0.0, 0.7, 1.4) for s in model.initial_states[:3]]
    laws = verify_flow_laws(g, h, model.system, grid, threshold=1e-5)
    assert laws.passed, laws.discrepancies
    worst = dict(laws.discrepancies)

    X = get_model("milne-pinney-demo").system
    gX = flow_of(X)
    Xinv = inverse_field(X, flow=gX)
    ginv = invert(gX)
    inv_err = rld_err = 0.0
    for t in (0.4, 1.0, 1.6):
        for y in ([1.0, 0.3], [0.7, -0.5]):
            inv_err = max(inv_err, float(np.max(np.abs(np.subtract(Xinv(t, y), right_log_derivative(ginv, t, y))))))
            rld_err = max(rld_err, float(np.max(np.abs(np.subtract(right_log_derivative(gX, t, y), X(t, y))))))
    # time-independent case: X^-1 = -X
    A = NumericField(lambda t, x: [x[1], -math.sin(x[0])], 2)
    Ainv = inverse_field(A)
    for t in (0.5, 1.5):
        for y in ([0.3, 0.2], [1.0, -0.4]):
            inv_err = max(inv_err, float(np.max(np.abs(np.add(Ainv(t, y), A(t, y))))))
    assert inv_err <= 1e-5 and rld_err <= 1e-5
    worst["inverse field"] = inv_err
    worst["right-log derivative"] = rld_err
    _crit(record_property, "4 law suite", ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_5_milne_pinney(record_property):
    eq = get_model("milne-pinney-equilibrium")
    (rep,) = eq.invariant_reports(window=(0, 10))
    assert rep.max_rel_drift <= 1e-9

    rng = np.random.default_rng(SEED)
    states = []
    probe = build_milne_pinney("1/5", -1, 1)
    pinney = probe.rule("pinney")
    while len(states) < 5:
        s = [float(rng.uniform(0.5, 1.5)), float(rng.uniform(-0.8, 0.8))]
        xs = pinney.particular_initial
        k = pinney.rule.resolve_constants(0.0, s, xs)
        if pinney.rule.discriminant(0.0, xs, k) > 1e-3:
            states.append(s)
    demo = build_milne_pinney("1/5", -1, 1, initial_states=states)
    sup = demo.rule("pinney").run(demo, window=(0, 2), threshold=1e-6)
    rule_err = max(r.max_rel_drift for r in sup)
    assert len(sup) == 5 and rule_err <= 1e-6

    broken = get_model("milne-pinney-broken")
    neg = max(r.max_rel_drift for r in broken.invariant_reports())
    assert neg >= 1e-2
    _crit(record_property, "5 Milne-Pinney",
          f"equilibrium {rep.max_rel_drift:.1e}, rule {rule_err:.1e}, negative control {neg:.1e}")


def test_6_nonlinear_oscillator(record_property):
    model = build_nonlinear_oscillator(1, 2, 1, "exp(t)")
    worst = {"I1": 0.0, "I2": 0.0, "I3": 0.0}
    for r in model.invariant_reports():
        key = r.name.split("[")[0]
        if key in worst:
            worst[key] = max(worst[key], r.max_rel_drift)
    assert worst["I1"] <= 1e-6 and worst["I2"] <= 1e-6 and worst["I3"] <= 1e-5
    _crit(record_property, "6 nonlinear oscillator", ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_7_emden(record_property):
    model = get_model("emden")
    reps = model.invariant_reports()
    worst = max(r.max_rel_drift for r in reps)
    assert len(reps) >= 5 and worst <= 1e-7
    assert model.references["b"].eval_exact(0) == Fraction(-4)
    assert emden_relation(model, "consistent").passed
    _crit(record_property, "7 Emden", f"I' drift {worst:.1e} over {len(reps)} states, b(0) = -4 exactly")


def test_8_mathews_lakshmanan(record_property):
    dis = build_mathews_lakshmanan("-1/10", 1)
    d = max(r.max_rel_drift for r in dis.invariant_reports(window=(0, 5)))
    aut = build_mathews_lakshmanan(0, 1)
    a = max(r.max_rel_drift for r in aut.invariant_reports(window=(0, 5)))
    assert d <= 1e-7 and a <= 1e-8
    _crit(record_property, "8 Mathews-Lakshmanan", f"dissipative {d:.1e}, autonomous {a:.1e}")


def test_9_hypergeometric(record_property):
    assert gauss_2f1(1, 1, 2, 0) == 1.0
    worst = 0.0
    for z in (0.5, -1.0, -3.0):
        oracle = -math.log(1 - z) / z
        worst = max(worst, abs(gauss_2f1(1, 1, 2, z) - oracle) / abs(oracle))
    assert worst <= 1e-12
    _crit(record_property, "9 2F1", f"log oracle agreement {worst:.1e}")


def test_10_riccati(record_property):
    model = get_model("riccati")
    reps = model.rule("cross-ratio").run(model, window=(0, 1), threshold=1e-7)
    worst = max(r.max_abs_drift for r in reps)
    assert reps and worst <= 1e-7
    _crit(record_property, "10 Riccati cross ratio", f"sup error {worst:.1e} over {len(reps)} solutions")


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    return main([str(a) for a in argv], out=out, err=err), out.getvalue()


def test_11_cli_contract(record_property, tmp_path):
    mp = tmp_path / "mp.json"
    broken = tmp_path / "broken.json"
    assert _cli("catalog", "emit", "milne-pinney-demo", "--out", mp)[0] == EXIT_OK
    assert _cli("catalog", "emit", "milne-pinney-broken", "--out", broken)[0] == EXIT_OK
    assert _cli("verify", "invariants", mp)[0] == EXIT_OK
    assert _cli("verify", "invariants", broken)[0] == EXIT_FAIL
    assert _cli("verify", "invariants", tmp_path / "absent.json")[0] == EXIT_USAGE
    assert _cli("no-such-command")[0] == EXIT_USAGE
    assert _cli("integrate", mp, "--t1", "100", "--out", tmp_path / "far.csv")[0] == EXIT_NUMERIC

    # JSON: model files and reports survive a round trip unchanged
    again = tmp_path / "again.json"
    save_model(load_model(mp), again)
    assert mp.read_text() == again.read_text()
    code, text = _cli("verify", "invariants", mp, "--json")
    direct = get_model("milne-pinney-demo").invariant_reports()
    assert [r["max_abs_drift"] for r in json.loads(text)] == [r.max_abs_drift for r in direct]

    # CSV: 17 significant digits reproduce every float
    csv_path = tmp_path / "traj.csv"
    assert _cli("integrate", mp, "--out", csv_path)[0] == EXIT_OK
    back = Trajectory.from_csv(csv_path)
    traj = get_model("milne-pinney-demo").integrate(0)
    assert np.array_equal(back.times, traj.times) and np.array_equal(back.states, traj.states)
    _crit(record_property, "11 CLI contract",
          f"exit codes 0/1/2/3, JSON and CSV round trips exact ({len(traj.times)} nodes)")
