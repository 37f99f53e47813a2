"""ModelSpec and its JSON representation.

A model file is a JSON object::

    name            model name
    variables       state variable names, e.g. ["x", "v"]
    parameters      name -> number (strings such as "1/2" are read exactly)
    references      ordered name -> definition of scalar functions of time:
                      {"expr": "<time expression>"}
                      {"antiderivative": "<integrand>", "base_t": 0, "base_value": 0,
                       "closed_form": "<optional expression>", "window": [lo, hi]}
    basis           one array of component expressions per basis field of V
    basis_names     optional names of the basis fields
    w_indices       indices of the basis fields spanning W
    coefficients    one time expression per basis field: X_t = sum b_a(t) X_a
    controls        name -> {"type": "affine", "alpha", "beta", "gamma"}
                         | {"type": "scaling", "alpha"}
    invariants      [{"name", "expr", "copies", "companion", "initial_states", "threshold"}]
                    expressions over t and the state; with copies > 1 the
                    variables of copy i carry the suffix i (x1, v1, x2, ...);
                    "companion" = {"variables", "rhs", "initial"} appends an
                    auxiliary system integrated alongside
    rules           [{"name", "kind", ...}] superposition rules (see rules.py)
    target          optional {"name", "combinations"}: a Lie subalgebra of V
    window          default time window [t0, t1]
    initial_states  default initial states

Every expression may use ``t``, the parameters and previously defined
references called as ``name(t)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from ..dynamics import IntegratorConfig, Trajectory, antiderivative, integrate_ivp
from ..errors import ModelFileError, QuasiLieError
from ..fields import FieldSpace, SchemeReport, SymbolicVectorField, check_scheme
from ..flows import AffineFlow2D, GeneralizedFlow, ScalingFlow2D
from ..timedep import expr as E
from ..timedep.functions import ExpressionFunction, ScalarTimeFunction
from ..timedep.tdfield import NumericField, TimeDependentField, diagonal_prolongation
from ..verify import DEFAULT_SAMPLES, DEFAULT_THRESHOLD, Observable, invariant_drift

# antiderivatives are integrated on the model window widened by this fraction
REFERENCE_PAD = 0.05

REQUIRED = ("name", "variables", "basis", "w_indices", "coefficients", "window")


def parse_number(value):
    """JSON number or rational string -> int, Fraction or float."""
    if isinstance(value, bool):
        raise ModelFileError(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return int(value) if value.is_integer() else value
    if isinstance(value, str):
        try:
            q = Fraction(value.strip())
        except ValueError:
            raise ModelFileError(f"not a number: {value!r}") from None
        return q.numerator if q.denominator == 1 else q
    raise ModelFileError(f"expected a number, got {value!r}")


def number_to_json(value):
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    return value


def copy_variables(variables: Sequence[str], copies: int) -> list:
    if copies == 1:
        return list(variables)
    return [f"{v}{i + 1}" for i in range(copies) for v in variables]


@dataclass
class InvariantSpec:
    name: str
    observable: Observable
    copies: int = 1
    companion: dict | None = None
    companion_field: NumericField | None = None
    initial_states: list | None = None
    threshold: float | None = None
    source: dict = field(default_factory=dict)

    def augmented_field(self, system) -> NumericField:
        base = system if self.copies == 1 else diagonal_prolongation(system, self.copies)
        if self.companion_field is None:
            return base
        comp = self.companion_field
        n = base.dim

        def fn(t, z):
            return list(base(t, z[:n])) + list(comp(t, z))

        return NumericField(fn, n + len(self.companion["variables"]), name=f"{self.name} system")


@dataclass
class ModelSpec:
    name: str
    variables: tuple
    V: FieldSpace
    W: FieldSpace
    system: TimeDependentField
    parameters: dict
    references: dict
    controls: dict
    invariants: list
    rules: list
    window: tuple
    initial_states: list
    target: FieldSpace | None = None
    flags: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def scheme_report(self) -> SchemeReport:
        return check_scheme(self.W, self.V)

    def control(self, name: str | None = None) -> GeneralizedFlow:
        return self.controls[self.control_name(name)]

    def control_name(self, name: str | None = None) -> str:
        """``name`` checked against the controls; None selects the first one."""
        if not self.controls:
            raise ModelFileError(f"model {self.name} has no controls")
        if name is None:
            return next(iter(self.controls))
        if name not in self.controls:
            raise ModelFileError(f"model {self.name} has no control {name!r}; "
                                 f"available: {', '.join(self.controls)}")
        return name

    def rule(self, name: str):
        for r in self.rules:
            if r.name == name:
                return r
        raise ModelFileError(f"model {self.name} has no rule {name!r}; "
                             f"available: {', '.join(r.name for r in self.rules) or 'none'}")

    def integrate(self, state, t0=None, t1=None, cfg: IntegratorConfig | None = None) -> Trajectory:
        if isinstance(state, int):
            state = self.initial_states[state]
        lo, hi = self.window
        return integrate_ivp(self.system, lo if t0 is None else t0, hi if t1 is None else t1,
                             state, cfg, variables=self.variables)

    def invariant_setups(self, inv: InvariantSpec) -> list:
        """Initial states of the augmented system used to test ``inv``."""
        if inv.initial_states:
            states = [list(s) for s in inv.initial_states]
        else:
            base = self.initial_states
            states = [sum((list(base[i + j]) for j in range(inv.copies)), [])
                      for i in range(len(base) - inv.copies + 1)]
        if inv.companion is not None:
            states = [s + list(inv.companion["initial"]) for s in states]
        return states

    def invariant_reports(self, window=None, threshold: float | None = None, samples: int = DEFAULT_SAMPLES,
                          cfg: IntegratorConfig | None = None) -> list:
        """Drift of every invariant along every setup; ``threshold`` overrides per-invariant ones."""
        lo, hi = window or self.window
        reports = []
        for inv in self.invariants:
            field_ = inv.augmented_field(self.system)
            thr = threshold if threshold is not None else (inv.threshold or DEFAULT_THRESHOLD)
            for i, z0 in enumerate(self.invariant_setups(inv)):
                traj = integrate_ivp(field_, lo, hi, z0, cfg)
                reports.append(invariant_drift(traj, inv.observable, samples, thr, name=f"{inv.name}[{i}]"))
        return reports

    def to_dict(self) -> dict:
        if not self.source:
            raise ModelFileError(f"model {self.name} was not built from a serializable description")
        bound = [k for k, v in self.source.get("references", {}).items() if v.get("bound")]
        if bound:
            raise ModelFileError(f"references {bound} are Python callables and cannot be written to JSON")
        return json.loads(json.dumps(self.source))

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _padded(window):
    lo, hi = window
    pad = REFERENCE_PAD * max(1.0, hi - lo)
    return (lo - pad, hi + pad)


def _time_function(src, params, refs, window=(-math.inf, math.inf)) -> ExpressionFunction:
    tree = E.bind(E.parse_time_expression(str(src), refs=tuple(refs)), params, refs)
    extra = E.free_variables(tree) - {"t"}
    if extra:
        raise ModelFileError(f"time expression {src!r} uses unknown names {sorted(extra)}")
    w = window
    for r in E.references_of(tree).values():
        w = (max(w[0], r.window[0]), min(w[1], r.window[1]))
    return ExpressionFunction(tree, window=w)


def _build_references(entries: Mapping, params, window, bound) -> dict:
    refs = {}
    for name, d in entries.items():
        if name in E.BUILTINS or name == "t" or name in params:
            raise ModelFileError(f"reference name {name!r} clashes with a builtin or parameter")
        if d.get("bound"):
            if name not in bound:
                raise ModelFileError(f"reference {name!r} must be supplied as a Python object")
            f = bound[name]
        elif "expr" in d:
            f = _time_function(d["expr"], params, refs)
        elif "antiderivative" in d:
            rwin = tuple(d.get("window", _padded(window)))
            integrand = _time_function(d["antiderivative"], params, refs).with_window(rwin)
            closed = d.get("closed_form")
            if closed is not None:
                closed = _time_function(closed, params, refs, rwin)
            f = antiderivative(integrand, parse_number(d.get("base_t", 0)), parse_number(d.get("base_value", 0)),
                               window=rwin, closed_form=closed)
        else:
            raise ModelFileError(f"reference {name!r} needs 'expr', 'antiderivative' or 'bound'")
        if not d.get("bound"):
            f.name = name
        refs[name] = f
    return refs


def _control(name, d, params, refs) -> GeneralizedFlow:
    kind = d.get("type", "affine")
    fn = lambda key, default: _time_function(d.get(key, default), params, refs)  # noqa: E731
    if kind == "affine":
        return AffineFlow2D(fn("alpha", "1"), fn("beta", "0"), fn("gamma", "1"), name=name)
    if kind == "scaling":
        return ScalingFlow2D(fn("alpha", "1"), name=name)
    raise ModelFileError(f"unknown control type {kind!r}")


def model_from_dict(d: Mapping, bound: Mapping[str, ScalarTimeFunction] | None = None) -> ModelSpec:
    """Build a ModelSpec from its JSON description (see module docstring)."""
    from .rules import build_rule

    missing = [k for k in REQUIRED if k not in d]
    if missing:
        raise ModelFileError(f"model description lacks {missing}")
    try:
        variables = tuple(d["variables"])
        params = {k: parse_number(v) for k, v in d.get("parameters", {}).items()}
        window = tuple(float(w) for w in d["window"])
        if len(window) != 2 or not window[0] < window[1]:
            raise ModelFileError(f"bad window {d['window']!r}")
        refs = _build_references(d.get("references", {}), params, window, bound or {})
        exact_params = {k: v for k, v in params.items() if not isinstance(v, float)}
        basis = []
        for comps in d["basis"]:
            if len(comps) != len(variables):
                raise ModelFileError(f"basis field {comps} has {len(comps)} components for {len(variables)} variables")
            basis.append(SymbolicVectorField.from_expressions([str(c) for c in comps], variables, exact_params))
        V = FieldSpace(basis, names=d.get("basis_names") or [f"X{i + 1}" for i in range(len(basis))])
        w_idx = list(d["w_indices"])
        if any(not 0 <= i < len(basis) for i in w_idx):
            raise ModelFileError(f"w_indices {w_idx} out of range")
        W = FieldSpace([V[i] for i in w_idx], names=d.get("w_names") or [V.names()[i] for i in w_idx])
        coeffs = d["coefficients"]
        if len(coeffs) != len(basis):
            raise ModelFileError(f"{len(coeffs)} coefficients for {len(basis)} basis fields")
        system = TimeDependentField(V, [_time_function(c, params, refs) for c in coeffs], name=d["name"])
        controls = {k: _control(k, c, params, refs) for k, c in d.get("controls", {}).items()}
        invariants = []
        for inv in d.get("invariants", []):
            copies = int(inv.get("copies", 1))
            names = copy_variables(variables, copies)
            companion, comp_field = inv.get("companion"), None
            if companion is not None:
                cvars = list(companion["variables"])
                all_names = names + cvars
                rhs = [Observable.from_expression(str(r), all_names, params, refs, name=f"{inv['name']} companion")
                       for r in companion["rhs"]]
                comp_field = NumericField(lambda t, z, rhs=rhs: [r(t, z) for r in rhs], len(cvars))
                names = all_names
            obs = Observable.from_expression(inv["expr"], names, params, refs, name=inv["name"])
            invariants.append(InvariantSpec(inv["name"], obs, copies, companion, comp_field,
                                            inv.get("initial_states"),
                                            None if inv.get("threshold") is None else float(inv["threshold"]),
                                            dict(inv)))
        target = None
        if d.get("target"):
            combos = d["target"]["combinations"]
            target = FieldSpace([V.combination([parse_number(c) for c in row]) for row in combos],
                                names=d["target"].get("names"))
        states = [list(map(float, s)) for s in d.get("initial_states", [])]
        if any(len(s) != len(variables) for s in states):
            raise ModelFileError("initial state length does not match the variables")
        model = ModelSpec(d["name"], variables, V, W, system, params, refs, controls, invariants, [],
                          window, states, target, dict(d.get("flags", {})), dict(d))
        model.rules = [build_rule(model, r) for r in d.get("rules", [])]
        for k, g in controls.items():
            model.flags.setdefault(f"control {k} in G(W)", bool(getattr(g, "in_group", False)))
        return model
    except ModelFileError:
        raise
    except (QuasiLieError, KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"invalid model description: {exc}") from exc


def load_model(path) -> ModelSpec:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise ModelFileError(f"{path}: top level must be an object")
    return model_from_dict(d)


def save_model(model: ModelSpec, path) -> None:
    with open(path, "w") as fh:
        fh.write(model.to_json())
        fh.write("\n")


__all__ = ["ModelSpec", "InvariantSpec", "model_from_dict", "load_model", "save_model", "parse_number",
           "number_to_json", "copy_variables"]
