"""Superposition rules attached to catalog models.

Rule kinds:

``milne-pinney``
    x = sqrt(2) alpha/|W| (I2 y1^2 + I1 y2^2 +- sqrt(4 I1 I2 - k W^2/alpha^2) y1 y2)^(1/2)
    with y1, y2 solutions of the associated linear equation and
    W = y1 y2' - y2 y1'. Keys: ``alpha`` (time expression), ``k``,
    ``linear`` = {"variables", "rhs", "initial"} for the linear system.
``cross-ratio``
    Three solutions x1, x2, x3 of a Riccati equation determine every other
    one through the constant cross ratio
    k = (x - x1)(x2 - x3) / ((x - x2)(x1 - x3)). Keys:
    ``particular_states`` (indices into the model's initial states).
``identity``
    x = x1 (m = 1), a sanity baseline.

Optional keys for every kind: ``reference_states`` (indices of initial
states whose trajectories are compared against the rule) and ``threshold``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..dynamics import IntegratorConfig, integrate_ivp
from ..errors import ModelFileError
from ..timedep.tdfield import NumericField
from ..verify import BRANCH_TOL, DEFAULT_SAMPLES, DEFAULT_THRESHOLD, Observable, SuperpositionRule, verify_superposition


@dataclass
class RuleSpec:
    name: str
    kind: str
    rule: SuperpositionRule
    particular_field: object  # field whose solutions feed the rule
    particular_initial: list
    reference_states: list
    source: dict = field(default_factory=dict)

    @property
    def threshold(self):
        t = self.source.get("threshold")
        return None if t is None else float(t)

    def run(self, model, cfg: IntegratorConfig | None = None, sign_choice: str = "auto",
            samples: int = DEFAULT_SAMPLES, threshold: float = DEFAULT_THRESHOLD, window=None) -> list:
        lo, hi = window or model.window
        particulars = [integrate_ivp(self.particular_field, lo, hi, s, cfg) for s in self.particular_initial]
        reports = []
        for i in self.reference_states:
            ref = model.integrate(i, lo, hi, cfg)
            rep = verify_superposition(self.rule, particulars, ref, sign_choice, samples, threshold)
            rep.name = f"{self.name}[state {i}]"
            reports.append(rep)
        return reports


def _milne_pinney(model, d) -> RuleSpec:
    params, refs = model.parameters, model.references
    alpha = Observable.from_expression(str(d.get("alpha", "1")), (), params, refs, name="alpha")
    k_obs = Observable.from_expression(str(d.get("k", "k")), (), params, refs, name="k")
    lin = d["linear"]
    lvars = list(lin["variables"])
    rhs = [Observable.from_expression(str(r), lvars, params, refs, name="linear") for r in lin["rhs"]]
    linear = NumericField(lambda t, z: [r(t, z) for r in rhs], len(lvars), name="associated linear system")
    kk = k_obs(0.0, ())

    def wronskian(xs):
        (y1, w1), (y2, w2) = xs
        return y1 * w2 - y2 * w1

    def constants(t0, ref, xs):
        x, v = ref[0], ref[1]
        a = alpha(t0, ())
        return tuple(0.5 * ((y * v - w * x) ** 2 / a ** 2 + kk * (y / x) ** 2) for y, w in xs)

    def discriminant(t, xs, k):
        a = alpha(t, ())
        return 4 * k[0] * k[1] - kk / a ** 2 * wronskian(xs) ** 2

    def phi(t, xs, k, sign):
        (y1, _), (y2, _) = xs
        a = alpha(t, ())
        W = wronskian(xs)
        disc = discriminant(t, xs, k)
        # a vanishing discriminant must not turn roundoff into sqrt(roundoff)
        if disc <= BRANCH_TOL * max(1.0, 4 * abs(k[0] * k[1])):
            disc = 0.0
        inside = k[1] * y1 ** 2 + k[0] * y2 ** 2 + sign * math.sqrt(disc) * y1 * y2
        return [math.sqrt(2) * a / abs(W) * math.sqrt(max(inside, 0.0))]

    rule = SuperpositionRule(d["name"], 2, phi, constants, components=[0], discriminant=discriminant)
    return RuleSpec(d["name"], "milne-pinney", rule, linear, [list(map(float, s)) for s in lin["initial"]],
                    list(d.get("reference_states", range(len(model.initial_states)))), dict(d))


def cross_ratio_phi(t, xs, k, sign=None):
    (x1,), (x2,), (x3,) = xs
    (c,) = k
    # solve (x - x1)(x2 - x3) = c (x - x2)(x1 - x3) for x
    p, q = x2 - x3, x1 - x3
    return [(x1 * p - c * x2 * q) / (p - c * q)]


def cross_ratio(x, x1, x2, x3):
    return (x - x1) * (x2 - x3) / ((x - x2) * (x1 - x3))


def _cross_ratio(model, d) -> RuleSpec:
    idx = list(d.get("particular_states", [0, 1, 2]))
    if len(idx) != 3:
        raise ModelFileError("cross-ratio rule needs three particular states")
    if any(not 0 <= i < len(model.initial_states) for i in idx):
        raise ModelFileError(f"cross-ratio particular states {idx} not among the {len(model.initial_states)} "
                             "initial states")
    refs = list(d.get("reference_states", [i for i in range(len(model.initial_states)) if i not in idx]))

    def constants(t0, ref, xs):
        return (cross_ratio(ref[0], xs[0][0], xs[1][0], xs[2][0]),)

    rule = SuperpositionRule(d["name"], 3, cross_ratio_phi, constants)
    return RuleSpec(d["name"], "cross-ratio", rule, model.system, [model.initial_states[i] for i in idx], refs,
                    dict(d))


def _identity(model, d) -> RuleSpec:
    i = int(d.get("particular_state", 0))
    rule = SuperpositionRule(d["name"], 1, lambda t, xs, k, s: list(xs[0]))
    return RuleSpec(d["name"], "identity", rule, model.system, [model.initial_states[i]],
                    list(d.get("reference_states", [i])), dict(d))


KINDS = {"milne-pinney": _milne_pinney, "cross-ratio": _cross_ratio, "identity": _identity}


def build_rule(model, d) -> RuleSpec:
    kind = d.get("kind")
    if kind not in KINDS:
        raise ModelFileError(f"unknown rule kind {kind!r}; known: {', '.join(KINDS)}")
    if "name" not in d:
        raise ModelFileError("rule without a name")
    return KINDS[kind](model, d)
