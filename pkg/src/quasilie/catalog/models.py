"""Constructors for the catalog systems.

Every constructor writes a JSON model description (see modelfile.py) and
builds the ModelSpec from it, so a model emitted to disk and read back is
the same model. Function arguments may be expression strings, numbers or
ScalarTimeFunction objects; functions that cannot be written as an
expression are kept as bound references and make the model unserialisable.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..bases import XV
from ..errors import NotASolution, WindowError, ZeroCrossing
from ..timedep import expr as E
from ..timedep.functions import ExpressionFunction, ScalarTimeFunction, as_time_function
from ..verify import DriftReport
from .modelfile import ModelSpec, model_from_dict, number_to_json

# gamma1'' = b gamma1 is checked on this many points of the window
ODE_CHECK_POINTS = 101
ODE_CHECK_TOL = 1e-8
# looser bound when the second derivative is only available by differencing
ODE_CHECK_TOL_NUMERIC = 1e-5


def _exact(value):
    """int / Fraction / float / numeric string -> JSON number or rational string."""
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        value = Fraction(repr(value))
    if isinstance(value, Fraction):
        return number_to_json(value)
    return int(value)


def _entry(name, value, bound):
    """Reference entry for a user supplied function of time."""
    if isinstance(value, str):
        return {"expr": value}
    if isinstance(value, (int, float, Fraction)):
        return {"expr": str(_exact(value))}
    if isinstance(value, ExpressionFunction) and not E.references_of(value.node):
        return {"expr": E.to_string(value.node)}
    if isinstance(value, ScalarTimeFunction) or callable(value):
        bound[name] = as_time_function(value)
        return {"bound": True}
    raise TypeError(f"cannot use {value!r} as a function of time")


def _affine_basis_json(n):
    # same fields as bases.affine_basis(n)
    return [["0", "x"], ["0", _pow("x", n)], ["v", "0"], ["0", "v"], ["x", "0"]]


def _pow(base, e):
    return f"{base}^{e}" if e >= 0 else f"{base}^({e})"


def _is_zero(value):
    if isinstance(value, (int, float, Fraction)):
        return value == 0
    if isinstance(value, str):
        try:
            return Fraction(value.strip()) == 0
        except ValueError:
            return False
    return False


def _constant_value(value):
    """The value of a constant function argument, or None."""
    if isinstance(value, (int, float, Fraction)):
        return Fraction(repr(value)) if isinstance(value, float) else Fraction(value)
    f = as_time_function(value) if isinstance(value, str) else value
    if isinstance(f, ExpressionFunction) and f.is_constant():
        try:
            return f.eval_exact(0)
        except Exception:
            return None
    return None


# ---------------------------------------------------------------------------
# Milne-Pinney
# ---------------------------------------------------------------------------

MP_STATES = [[1.0, 0.5], [0.8, -0.3], [1.5, 0.2], [1.2, 0.7], [0.6, 0.4]]


def build_milne_pinney(a, b, k, c_scale=1, window=(0, 2), initial_states=None,
                       name="milne-pinney") -> ModelSpec:
    """x'' = a(t) x' + b(t) x + c(t)/x^3 with c(t) = k exp(2 A(t)), A' = a, A(0) = 0.

    ``c_scale`` multiplies c and breaks the integrability condition when it
    differs from 1 (negative control).
    """
    if _is_zero(k):
        raise ValueError("k must be non-zero")
    bound = {}
    refs = {
        "a": _entry("a", a, bound),
        "b": _entry("b", b, bound),
        "A": {"antiderivative": "a(t)", "base_t": 0, "base_value": 0},
        "alpha": {"expr": "exp(A(t))"},
        "c": {"expr": "c_scale*k*exp(2*A(t))"},
    }
    c_value = _constant_value(a)
    if c_value is not None:
        refs["A"]["closed_form"] = "0" if c_value == 0 else f"{number_to_json(c_value)}*t"
    d = {
        "name": name,
        "variables": list(XV),
        "parameters": {"k": _exact(k), "c_scale": _exact(c_scale)},
        "references": refs,
        "basis": _affine_basis_json(-3),
        "basis_names": ["X1", "X2", "X3", "X4", "X5"],
        "w_indices": [3, 0, 4],
        "w_names": ["Y1", "Y2", "Y3"],
        "coefficients": ["b(t)", "c(t)", "1", "a(t)", "0"],
        "controls": {"liouville": {"type": "affine", "alpha": "alpha(t)", "beta": "0", "gamma": "1"}},
        "target": {"names": ["X3 + k X2", "X1", "(X5 - X4)/2"],
                   "combinations": [[0, _exact(k), 1, 0, 0], [1, 0, 0, 0, 0], [0, 0, 0, "-1/2", "1/2"]]},
        "invariants": [{
            "name": "I",
            "expr": "exp(-2*A(t))*(xb*v - vb*x)^2 + k*(xb/x)^2",
            "companion": {"variables": ["xb", "vb"], "rhs": ["vb", "a(t)*vb + b(t)*xb"], "initial": [1, 0]},
        }],
        "rules": [{
            "name": "pinney",
            "kind": "milne-pinney",
            "alpha": "alpha(t)",
            "k": "k",
            "linear": {"variables": ["y", "w"], "rhs": ["w", "a(t)*w + b(t)*y"], "initial": [[1, 0], [0, 1]]},
        }],
        "window": list(window),
        "initial_states": [list(s) for s in (initial_states or MP_STATES)],
        "flags": {"integrability condition": Fraction(str(_exact(c_scale))) == 1},
    }
    return model_from_dict(d, bound)


# ---------------------------------------------------------------------------
# nonlinear oscillators x'' = b(t) x + c(t) x^n
# ---------------------------------------------------------------------------

NLO_STATES = [[0.5, 2.0], [0.4, 1.8], [0.6, 2.2], [0.3, 1.5]]


def _check_gamma(gamma, b, window):
    ts = np.linspace(window[0], window[1], ODE_CHECK_POINTS)
    g = [gamma(float(t)) for t in ts]
    for t, lo, hi in zip(ts[1:], g[:-1], g[1:]):
        if lo == 0 or hi == 0 or (lo > 0) != (hi > 0):
            raise ZeroCrossing(f"gamma1 vanishes near t={t:.6g}")
    d2 = gamma.derivative().derivative()
    tol = ODE_CHECK_TOL if isinstance(d2, ExpressionFunction) else ODE_CHECK_TOL_NUMERIC
    for t, gt in zip(ts, g):
        t = float(t)
        res = d2(t) - b(t) * gt
        if abs(res) > tol * max(1.0, abs(b(t) * gt)):
            raise NotASolution(f"gamma1'' - b gamma1 = {res:.3e} at t={t:.6g}")


def _nlo_integral(i, n, copies=True):
    x, v = (f"x{i}", f"v{i}") if copies else ("x", "v")
    return (f"1/2*(gamma1(t)*{v} - gamma1_dot(t)*{x})^2"
            f" - c0*{_pow(x, n + 1)}/(gamma1(t)^({n + 1})*({n + 1}))")


def _nlo_i3(n):
    p = f"1/({n + 1})"

    def part(i):
        Ii = _nlo_integral(i, n)
        z = f"-c0*{_pow(f'x{i}', n + 1)}/(gamma1(t)^({n + 1})*({Ii})*({n + 1}))"
        return f"x{i}/sqrt({Ii})*hyp2f1({p}, 1/2, 1 + {p}, {z})"

    return f"({part(1)} - {part(2)})/gamma1(t)"


def build_nonlinear_oscillator(b, n, c0, gamma1, window=(0, 2), initial_states=None,
                               name="nonlinear-oscillator") -> ModelSpec:
    """x'' = b(t) x + c(t) x^n with c(t) = c0 gamma1(t)^-(n+3) and gamma1'' = b gamma1.

    The integrals I1, I2 (energies of the two copies) are attached for every
    c0; I3 (hypergeometric) needs v' = gamma1 v - gamma1' x > 0 on both copies
    and is attached only for c0 > 0 and n > -1, where v' stays positive once
    positive for x > 0.
    """
    n = int(n)
    if n in (-1, 0, 1):
        raise ValueError("n must differ from -1, 0 and 1")
    lo, hi = window
    bound = {}
    g_entry = _entry("gamma1", gamma1, bound)
    refs = {"b": _entry("b", b, bound), "gamma1": g_entry}
    if "expr" in g_entry:
        node = E.bind(E.parse_time_expression(g_entry["expr"]), None, None)
        refs["gamma1_dot"] = {"expr": E.to_string(E.diff(node, "t"))}
        g_fn = ExpressionFunction(node)
    else:
        g_fn = bound["gamma1"]
        bound["gamma1_dot"] = g_fn.derivative()
        refs["gamma1_dot"] = {"bound": True}
    b_fn = bound["b"] if "b" in bound else as_time_function(refs["b"]["expr"])
    _check_gamma(g_fn, b_fn, (lo, hi))
    refs["c"] = {"expr": f"c0*gamma1(t)^({-(n + 3)})"}
    invariants = [{"name": "I", "expr": _nlo_integral(None, n, copies=False)},
                  {"name": "I1", "expr": _nlo_integral(1, n), "copies": 2},
                  {"name": "I2", "expr": _nlo_integral(2, n), "copies": 2}]
    c0v = Fraction(repr(c0)) if isinstance(c0, float) else Fraction(c0)
    if c0v > 0 and n > -1:
        invariants.append({"name": "I3", "expr": _nlo_i3(n), "copies": 2, "threshold": 1e-5})
    d = {
        "name": name,
        "variables": list(XV),
        "parameters": {"c0": _exact(c0)},
        "references": refs,
        "basis": _affine_basis_json(n),
        "basis_names": ["X1", "X2", "X3", "X4", "X5"],
        "w_indices": [3, 0, 4],
        "w_names": ["Y1", "Y2", "Y3"],
        "coefficients": ["b(t)", "c(t)", "1", "0", "0"],
        "controls": {"gamma1": {"type": "affine", "alpha": "1/gamma1(t)", "beta": "gamma1_dot(t)",
                                "gamma": "gamma1(t)"}},
        "target": {"names": ["X3 + c0 X2"], "combinations": [[0, _exact(c0), 1, 0, 0]]},
        "invariants": invariants,
        "window": [lo, hi],
        "initial_states": [list(s) for s in (initial_states or NLO_STATES)],
        "flags": {"integrability condition": True},
    }
    return model_from_dict(d, bound)


def build_perelomov(omega, s, c, gamma1, window=(0, 1), initial_states=None, name="perelomov") -> ModelSpec:
    """x'' = -s c^2 gamma1^-(s+2) x^(s-1) - omega^2 x, with gamma1'' + omega^2 gamma1 = 0."""
    s = int(s)
    w = as_time_function(omega) if not isinstance(omega, ScalarTimeFunction) else omega
    b = -(w * w)
    cv = Fraction(repr(c)) if isinstance(c, float) else Fraction(c)
    states = initial_states or [[0.5, 0.3], [1.0, 0.0], [0.8, -0.2], [0.2, 0.5]]
    return build_nonlinear_oscillator(b, s - 1, -s * cv * cv, gamma1, window, states, name)


# ---------------------------------------------------------------------------
# Emden equations x'' = a(t) x' + b(t) x^n
# ---------------------------------------------------------------------------

EMDEN_STATES = [[1.0, 0.0], [0.5, 0.5], [1.0, 0.5], [2.0, 0.2], [0.8, 1.0]]
EMDEN_B_CHECK_POINTS = 201


def build_emden(a, n, window=(0, 2), initial_states=None, name="emden") -> ModelSpec:
    """Emden equation with b(t) = -4 exp(2A) / gamma^(n+3) so that it becomes a Lie system.

    A' = a, A(0) = 0; B' = exp(A), B(0) = 1/2; gamma = sqrt(2B),
    alpha = 4 exp(A)/gamma. The control has alpha(0) = 4, so it is not in
    the group of the scheme.
    """
    n = int(n)
    if n in (0, 1):
        raise ValueError("n must differ from 0 and 1")
    bound = {}
    refs = {
        "a": _entry("a", a, bound),
        "A": {"antiderivative": "a(t)", "base_t": 0, "base_value": 0},
        "B": {"antiderivative": "exp(A(t))", "base_t": 0, "base_value": "1/2"},
        "gamma": {"expr": "sqrt(2*B(t))"},
        "alpha": {"expr": "4*exp(A(t))/gamma(t)"},
        "b": {"expr": f"-4*exp(2*A(t))/gamma(t)^({n + 3})"},
    }
    c_value = _constant_value(a)
    if c_value is not None:
        if c_value == 0:
            refs["A"]["closed_form"] = "0"
            refs["B"]["closed_form"] = "1/2 + t"
        else:
            cv = number_to_json(c_value)
            refs["A"]["closed_form"] = f"{cv}*t"
            refs["B"]["closed_form"] = f"1/2 + (exp({cv}*t) - 1)/({cv})"
    d = {
        "name": name,
        "variables": list(XV),
        "parameters": {"n": n},
        "references": refs,
        "basis": _affine_basis_json(n),
        "basis_names": ["X1", "X2", "X3", "X4", "X5"],
        "w_indices": [3, 0, 4],
        "w_names": ["Y1", "Y2", "Y3"],
        "coefficients": ["0", "b(t)", "1", "a(t)", "0"],
        "controls": {"emden": {"type": "affine", "alpha": "alpha(t)", "beta": "0", "gamma": "gamma(t)"}},
        "target": {"names": ["4 X3 - X5 + X4 - X2"], "combinations": [[0, -1, 4, 1, -1]]},
        "invariants": [{"name": "I'",
                        "expr": f"(v^2 - 2*b(t)*{_pow('x', n + 1)}/({n + 1}))*exp(-2*A(t))*B(t)"
                                " - x*v*exp(-A(t))",
                        "threshold": 1e-7}],
        "window": list(window),
        "initial_states": [list(s) for s in (initial_states or EMDEN_STATES)],
        "flags": {"integrability condition": True},
    }
    model = model_from_dict(d, bound)
    B = model.references["B"]
    for t in np.linspace(window[0], window[1], EMDEN_B_CHECK_POINTS):
        if not B(float(t)) > 0:
            raise WindowError(f"B(t) = {B(float(t))!r} <= 0 at t={float(t):.6g}; gamma is not real")
    return model


def emden_relation(model: ModelSpec, exponent: str = "printed", samples: int = 201,
                   threshold: float = 1e-8) -> DriftReport:
    """Constancy of (-b)^(-2/(n+3)) exp(4A/(n+3)) - 2^e (B(t) - B(0)) along the window.

    ``exponent`` selects e = (n-1)/(n+1) ("printed") or e = (n-1)/(n+3)
    ("consistent"). b is negative, so the real power is taken of -b.
    """
    n = int(model.parameters["n"])
    if exponent == "printed":
        e = (n - 1) / (n + 1)
    elif exponent == "consistent":
        e = (n - 1) / (n + 3)
    else:
        raise ValueError("exponent must be 'printed' or 'consistent'")
    b, A, B = model.references["b"], model.references["A"], model.references["B"]
    lo, hi = model.window
    B0 = B(lo)

    def R(t):
        return (-b(t)) ** (-2 / (n + 3)) * math.exp(4 * A(t) / (n + 3)) - 2 ** e * (B(t) - B0)

    R0 = R(lo)
    worst, where = 0.0, lo
    for t in np.linspace(lo, hi, samples):
        d = abs(R(float(t)) - R0)
        if d > worst:
            worst, where = d, float(t)
    return DriftReport(f"emden relation ({exponent})", worst, worst / max(1.0, abs(R0)), where, samples, R0,
                       threshold, {"exponent": e})


# ---------------------------------------------------------------------------
# Mathews-Lakshmanan
# ---------------------------------------------------------------------------

ML_STATES = [[0.5, 0.2], [1.0, 0.0], [0.0, 0.5], [-0.3, 0.4], [0.8, -0.6]]


def build_mathews_lakshmanan(F, lam, window=(0, 5), initial_states=None,
                             name="mathews-lakshmanan") -> ModelSpec:
    """(1 + lam x^2) x'' - F (1 + lam x^2) x' - lam x x'^2 + omega x = 0, omega = -exp(2 int F)."""
    lv = Fraction(repr(lam)) if isinstance(lam, float) else Fraction(lam)
    if not lv > 0:
        raise ValueError("lambda must be positive")
    bound = {}
    refs = {
        "F": _entry("F", F, bound),
        "IF": {"antiderivative": "F(t)", "base_t": 0, "base_value": 0},
        "alpha": {"expr": "exp(IF(t))"},
        "omega": {"expr": "-alpha(t)^2"},
    }
    c_value = _constant_value(F)
    if c_value is not None:
        refs["IF"]["closed_form"] = "0" if c_value == 0 else f"{number_to_json(c_value)}*t"
    d = {
        "name": name,
        "variables": list(XV),
        "parameters": {"lam": _exact(lam)},
        "references": refs,
        # same fields as bases.ml_basis(lam)
        "basis": [["v", "lam*x*v^2/(1 + lam*x^2)"], ["0", "x/(1 + lam*x^2)"], ["0", "v"]],
        "basis_names": ["X1", "X2", "X3"],
        "w_indices": [2],
        "coefficients": ["1", "-omega(t)", "F(t)"],
        "controls": {"scaling": {"type": "scaling", "alpha": "alpha(t)"}},
        "target": {"names": ["X1 + X2"], "combinations": [[1, 1, 0]]},
        "invariants": [{"name": "I(t,x,v)", "expr": "(alpha(t)^2 + lam*alpha(t)^2*x^2)/(alpha(t)^2 + lam*v^2)",
                        "threshold": 1e-7}],
        "window": list(window),
        "initial_states": [list(s) for s in (initial_states or ML_STATES)],
        "flags": {"integrability condition": True},
    }
    return model_from_dict(d, bound)


# ---------------------------------------------------------------------------
# Riccati
# ---------------------------------------------------------------------------

RICCATI_STATES = [[-1.0], [-0.5], [0.0], [0.3], [0.5]]


def build_riccati(b0, b1, b2, window=(0, 1), initial_states=None, name="riccati") -> ModelSpec:
    """x' = b0(t) + b1(t) x + b2(t) x^2, a Lie system for sl(2)."""
    bound = {}
    refs = {"b0": _entry("b0", b0, bound), "b1": _entry("b1", b1, bound), "b2": _entry("b2", b2, bound)}
    states = [list(s) for s in (initial_states or RICCATI_STATES)]
    d = {
        "name": name,
        "variables": ["x"],
        "references": refs,
        "basis": [["1"], ["x"], ["x^2"]],
        "basis_names": ["Y0", "Y1", "Y2"],
        "w_indices": [0, 1, 2],
        "coefficients": ["b0(t)", "b1(t)", "b2(t)"],
        "window": list(window),
        "initial_states": states,
    }
    if len(states) >= 4:
        d["invariants"] = [{"name": "cross ratio", "expr": "(x4 - x1)*(x2 - x3)/((x4 - x2)*(x1 - x3))",
                            "copies": 4, "threshold": 1e-7}]
        d["rules"] = [{"name": "cross-ratio", "kind": "cross-ratio", "particular_states": [0, 1, 2],
                       "threshold": 1e-7}]
    return model_from_dict(d, bound)


__all__ = ["build_milne_pinney", "build_nonlinear_oscillator", "build_perelomov", "build_emden",
           "emden_relation", "build_mathews_lakshmanan", "build_riccati"]
