"""Numerical checks: drift of constants of motion, superposition rules, flow laws."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .dynamics import IntegratorConfig, Trajectory, integrate_ivp
from .errors import BranchCrossing, DimensionMismatch, DomainError
from .flows import GeneralizedFlow, compose_flows, push_forward_numeric
from .timedep import expr as E
from .timedep.tdfield import autonomise

DEFAULT_SAMPLES = 200
DEFAULT_THRESHOLD = 1e-6


class Observable:
    """A real function I(t, x) of time and state."""

    def __init__(self, evaluator: Callable, name: str = "I", source: str | None = None):
        self.evaluator = evaluator
        self.name = name
        self.source = source

    def __call__(self, t, x) -> float:
        value = self.evaluator(t, x)
        if not math.isfinite(value):
            raise DomainError(f"observable {self.name} is not finite at t={t!r}, x={list(x)}")
        return value

    @classmethod
    def from_expression(cls, src: str, variables: Sequence[str], params: Mapping | None = None,
                        refs: Mapping | None = None, name: str = "I") -> "Observable":
        refs = dict(refs or {})
        tree = E.bind(E.parse_time_expression(src, refs=tuple(refs)), params, refs)
        names = ("t",) + tuple(variables)
        unknown = E.free_variables(tree) - set(names)
        if unknown:
            from .errors import UnknownVariable
            raise UnknownVariable(f"observable {name!r} uses unbound names {sorted(unknown)}")
        fn = E.compile_expr(tree, names)

        def ev(t, x):
            try:
                return fn((t, *x))
            except (ZeroDivisionError, OverflowError) as exc:
                raise DomainError(f"observable {name} failed at t={t!r}: {exc}") from None

        return cls(ev, name=name, source=src)

    def __repr__(self):
        return f"Observable({self.name!r}{', ' + repr(self.source) if self.source else ''})"


@dataclass
class DriftReport:
    name: str
    max_abs_drift: float
    max_rel_drift: float
    argmax_t: float
    samples: int
    reference_value: float | None = None
    threshold: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.threshold is None or self.max_rel_drift <= self.threshold

    def to_dict(self) -> dict:
        d = {"name": self.name, "max_abs_drift": self.max_abs_drift, "max_rel_drift": self.max_rel_drift,
             "argmax_t": self.argmax_t, "pass": self.passed}
        d.update(self.extra)
        return d

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name:<28} abs={self.max_abs_drift:.3e} rel={self.max_rel_drift:.3e} "
                f"at t={self.argmax_t:.6g}  {status}")


def reports_to_json(reports: Sequence[DriftReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=False)


def invariant_drift(traj: Trajectory, I: Observable, samples: int = DEFAULT_SAMPLES,
                    threshold: float | None = DEFAULT_THRESHOLD, name: str | None = None) -> DriftReport:
    """Sup over ``samples`` dense points of |I(t, x(t)) - I(t0, x0)|."""
    if samples < 2:
        raise ValueError("need at least two samples")
    t0 = traj.t0
    I0 = I(t0, traj.state_at_node(0))
    scale = max(1.0, abs(I0))
    worst, worst_t = 0.0, t0
    for t in np.linspace(traj.t0, traj.t1, samples):
        t = float(t)
        d = abs(I(t, traj.dense(t)) - I0)
        if d > worst:
            worst, worst_t = d, t
    return DriftReport(name or I.name, worst, worst / scale, worst_t, samples, I0, threshold)


@dataclass
class SuperpositionRule:
    """x = Phi(x_(1), ..., x_(m); k), optionally conjugated by a control g:

        x(t) = g_t^-1( Phi(t, g_t(x_(1)(t)), ..., g_t(x_(m)(t)); k) ).

    ``phi(t, xs, k, sign)`` returns the compared components; ``constants``
    is a fixed tuple or ``constants(t0, reference_state, particular_states)``.
    ``discriminant(t, xs, k)`` marks a two-branch rule.
    """

    name: str
    m: int
    phi: Callable
    constants: object = None
    control: GeneralizedFlow | None = None
    components: Sequence[int] | None = None
    discriminant: Callable | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("a superposition rule needs m >= 1")

    @property
    def branched(self) -> bool:
        return self.discriminant is not None

    def resolve_constants(self, t0, reference_state, particular_states):
        if callable(self.constants):
            return tuple(self.constants(t0, reference_state, particular_states))
        return tuple(self.constants or ())

    def evaluate(self, t, particular_states, k, sign=None) -> list:
        xs = particular_states
        if self.control is not None:
            xs = [self.control.forward(t, x) for x in xs]
        out = list(self.phi(t, xs, k, sign))
        if self.control is not None:
            out = self.control.inverse(t, out)
        return out


# discriminants within this (relative) band of zero count as zero
BRANCH_TOL = 1e-9
# branch outputs closer than this (relative) cannot be told apart by auto
AUTO_SEPARATION = 1e-6


def _sign(d, scale):
    if abs(d) <= BRANCH_TOL * max(1.0, scale):
        return 0
    return 1 if d > 0 else -1


def verify_superposition(rule: SuperpositionRule, particulars: Sequence[Trajectory], reference: Trajectory,
                         sign_choice: str = "auto", samples: int = DEFAULT_SAMPLES,
                         threshold: float | None = DEFAULT_THRESHOLD) -> DriftReport:
    """Compare the rule's output with ``reference`` on a shared grid.

    The relative error uses max(1, |reference|) as denominator. ``auto``
    picks the branch closest to the reference at the first sample where the
    two branches differ and holds it; if the discriminant
    changes sign along the way BranchCrossing is raised.
    """
    if len(particulars) != rule.m:
        raise DimensionMismatch(f"rule {rule.name} needs {rule.m} particular solutions, got {len(particulars)}")
    if sign_choice not in ("auto", "plus", "minus"):
        raise ValueError(f"sign_choice must be auto, plus or minus, not {sign_choice!r}")
    lo = max([reference.t0] + [p.t0 for p in particulars])
    hi = min([reference.t1] + [p.t1 for p in particulars])
    if not lo < hi:
        raise DomainError("trajectories do not share a time range")
    comps = list(rule.components) if rule.components is not None else list(range(reference.dim))
    ts = [float(t) for t in np.linspace(lo, hi, samples)]

    def particular_states(t):
        return [p.dense(t) for p in particulars]

    t0 = ts[0]
    ref0 = reference.dense(t0)
    xs0 = particular_states(t0)
    k = rule.resolve_constants(t0, ref0, xs0)

    def disc(t, xs):
        if rule.control is not None:
            xs = [rule.control.forward(t, x) for x in xs]
        return rule.discriminant(t, xs, k)

    sign = None
    s0 = 0
    d_scale = 1.0
    if rule.branched:
        d0 = disc(t0, xs0)
        d_scale = abs(d0)
        s0 = _sign(d0, d_scale)
        if s0 < 0:
            raise BranchCrossing(f"discriminant {d0:.3e} < 0 at t={t0}: no real branch")
        if sign_choice == "auto":
            # the first sample where the branches are distinguishable decides
            sign = 1
            for t in ts:
                xs, ref = (xs0, ref0) if t == t0 else (particular_states(t), reference.dense(t))
                errs = {}
                for s in (1, -1):
                    out = rule.evaluate(t, xs, k, s)
                    errs[s] = max(abs(out[i] - ref[c]) for i, c in enumerate(comps))
                if abs(errs[1] - errs[-1]) > AUTO_SEPARATION * max(1.0, max(abs(ref[c]) for c in comps)):
                    sign = 1 if errs[1] < errs[-1] else -1
                    break
        else:
            sign = 1 if sign_choice == "plus" else -1

    worst, worst_rel, worst_t = 0.0, 0.0, t0
    for t in ts:
        xs = particular_states(t)
        if rule.branched:
            s = _sign(disc(t, xs), d_scale)
            if s < 0:
                raise BranchCrossing(f"discriminant of {rule.name} changes sign near t={t:.6g}")
        out = rule.evaluate(t, xs, k, sign)
        ref = reference.dense(t)
        for i, c in enumerate(comps):
            d = abs(out[i] - ref[c])
            r = d / max(1.0, abs(ref[c]))
            worst = max(worst, d)
            if r > worst_rel:
                worst_rel, worst_t = r, t
    extra = {"constants": [float(v) for v in k]}
    if sign is not None:
        extra["branch"] = "plus" if sign > 0 else "minus"
    return DriftReport(rule.name, worst, worst_rel, worst_t, samples, None, threshold, extra)


# ---------------------------------------------------------------------------
# flow laws
# ---------------------------------------------------------------------------


@dataclass
class LawReport:
    discrepancies: dict
    argmax: dict
    threshold: float

    @property
    def passed(self) -> bool:
        return all(v <= self.threshold for v in self.discrepancies.values())

    def to_list(self) -> list:
        return [{"name": k, "max_abs_drift": v, "max_rel_drift": v, "argmax_t": self.argmax[k],
                 "pass": v <= self.threshold} for k, v in self.discrepancies.items()]


def _sup(pairs):
    worst, where = 0.0, None
    for t, a, b in pairs:
        d = float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))
        if where is None or d > worst:
            worst, where = d, t
    return worst, where


def lifted_flow(h: GeneralizedFlow) -> GeneralizedFlow:
    """hbar(t, x) = (t, h_t(x)) on R x R^n, a time-independent map."""
    n = h.dim

    def fwd(_s, z):
        return [z[0]] + h.forward(z[0], z[1:])

    def inv(_s, z):
        return [z[0]] + h.inverse(z[0], z[1:])

    def jac(_s, z):
        # d(t, h_t(x))/d(t, x) = [[1, 0], [dh/dt, Dh]]
        J = np.zeros((n + 1, n + 1))
        J[0, 0] = 1.0
        J[1:, 0] = h.time_derivative(z[0], z[1:])
        J[1:, 1:] = h.jacobian(z[0], z[1:])
        return J

    return GeneralizedFlow(fwd, inv, n + 1, jacobian=jac, time_derivative=lambda s, z: np.zeros(n + 1),
                           name=f"lift of {h.name or 'h'}")


def action_associativity(g, h, X, points) -> tuple:
    """sup |((g o h)*X)(t, y) - (g*(h*X))(t, y)| over (t, y) in points."""
    gh = push_forward_numeric(compose_flows(g, h), X)
    g_hx = push_forward_numeric(g, push_forward_numeric(h, X))
    return _sup((t, gh(t, y), g_hx(t, y)) for t, y in points)


def curve_transport(h, X, starts, t0, t1, cfg=None, samples: int = 20) -> tuple:
    """Integral curves of h*X are t -> h_t(c(t)) for integral curves c of X."""
    cfg = cfg or IntegratorConfig()
    hX = push_forward_numeric(h, X)
    pairs = []
    for x0 in starts:
        c = integrate_ivp(X, t0, t1, x0, cfg)
        e = integrate_ivp(hX, t0, t1, h.forward(t0, x0), cfg)
        for t in np.linspace(t0, t1, samples):
            t = float(t)
            pairs.append((t, h.forward(t, c.dense(t)), e.dense(t)))
    return _sup(pairs)


def autonomisation_equivariance(h, X, points) -> tuple:
    """hbar_* (autonomised X) against the autonomisation of h*X, on (t, y) points."""
    hb = lifted_flow(h)
    Xbar = autonomise(X)
    target = autonomise(push_forward_numeric(h, X))
    pairs = []
    for t, y in points:
        z = [t] + list(y)
        w = hb.inverse(0.0, z)
        J = hb.jacobian(0.0, w)
        pairs.append((t, J @ np.asarray(Xbar(0.0, w)), target(0.0, z)))
    return _sup(pairs)


def verify_flow_laws(g: GeneralizedFlow, h: GeneralizedFlow, X, grid: Sequence, threshold: float = DEFAULT_THRESHOLD,
                     transport_span: float = 1.0, cfg=None) -> LawReport:
    """Action associativity, integral-curve transport and autonomisation equivariance.

    ``grid`` is a sequence of (t, y) points; transport starts from the states
    of the grid at its earliest time and runs for ``transport_span``.
    """
    grid = [(float(t), list(y)) for t, y in grid]
    assoc, ta = action_associativity(g, h, X, grid)
    t0 = min(t for t, _ in grid)
    starts = [y for t, y in grid if t == t0][:4]
    transport, tt = curve_transport(h, X, starts, t0, t0 + transport_span, cfg)
    equiv, te = autonomisation_equivariance(h, X, grid)
    return LawReport({"action associativity": assoc, "integral-curve transport": transport,
                      "autonomisation equivariance": equiv},
                     {"action associativity": ta, "integral-curve transport": tt,
                      "autonomisation equivariance": te}, threshold)


__all__ = ["Observable", "DriftReport", "SuperpositionRule", "LawReport", "invariant_drift",
           "verify_superposition", "verify_flow_laws", "action_associativity", "curve_transport",
           "autonomisation_equivariance", "lifted_flow", "reports_to_json"]
