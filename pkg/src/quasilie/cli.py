"""Command line interface.

Exit codes: 0 every requested check passed, 1 a check failed, 2 usage or
input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import catalog
from .catalog.modelfile import load_model
from .dynamics import IntegratorConfig
from .errors import (
    BranchCrossing,
    DimensionMismatch,
    DomainError,
    IntegrationFailure,
    ModelFileError,
    NonConvergence,
    PoleError,
    QuasiLieError,
    SingularJacobian,
)
from .fields import Coefficients, decompose_in_span, is_lie_algebra, lie_bracket
from .flows import compose_flows, push_forward_affine_closed_form, push_forward_numeric
from .verify import DEFAULT_SAMPLES, DEFAULT_THRESHOLD, verify_flow_laws

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

NUMERIC_ERRORS = (IntegrationFailure, DomainError, PoleError, BranchCrossing, NonConvergence, SingularJacobian,
                  ZeroDivisionError, OverflowError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(out, payload, as_json, text_lines):
    if as_json:
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        for line in text_lines:
            out.write(line + "\n")


def _config(args) -> IntegratorConfig:
    return IntegratorConfig(rel_tol=args.rtol, abs_tol=args.atol)


def _field_index(model, token: str) -> int:
    names = model.V.names()
    if token in names:
        return names.index(token)
    try:
        i = int(token)
    except ValueError:
        raise UsageError(f"no basis field {token!r}; fields are {', '.join(names)} or 1..{len(names)}") from None
    if not 1 <= i <= len(names):
        raise UsageError(f"basis index {i} out of range 1..{len(names)}")
    return i - 1


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_scheme_check(args, out) -> int:
    model = load_model(args.model)
    report = model.scheme_report()
    payload = {"model": model.name, **report.to_dict(), "passed": report.passed}
    lie = is_lie_algebra(model.V)
    payload["v_is_lie_algebra"] = lie.is_lie
    if not lie.is_lie:
        i, j = lie.witness
        payload["v_lie_witness"] = [model.V.names()[i], model.V.names()[j]]
    if model.target is not None:
        payload["target_is_lie_algebra"] = is_lie_algebra(model.target).is_lie
    lines = [f"scheme of {model.name}: {'PASS' if report.passed else 'FAIL'}",
             f"  W in V        {report.w_in_v}",
             f"  [W, W] in W   {report.w_closed}",
             f"  [W, V] in V   {report.normalizes}",
             f"  V Lie algebra {lie.is_lie}" + ("" if lie.is_lie else f" (witness {payload['v_lie_witness']})")]
    for key in ("w_in_v_witness", "w_closed_witness", "normalizes_witness"):
        if payload.get(key) is not None:
            lines.append(f"  {key.replace('_', ' ')}: {payload[key]}")
    if "target_is_lie_algebra" in payload:
        lines.append(f"  target subalgebra closed {payload['target_is_lie_algebra']}")
    _emit(out, payload, args.json, lines)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bracket(args, out) -> int:
    model = load_model(args.model)
    i, j = _field_index(model, args.left), _field_index(model, args.right)
    names = model.V.names()
    Z = lie_bracket(model.V[i], model.V[j])
    dec = decompose_in_span(Z, model.V)
    payload = {"left": names[i], "right": names[j], "bracket": [str(c) for c in Z.components],
               "in_span": isinstance(dec, Coefficients)}
    lines = [f"[{names[i]}, {names[j]}] = {Z}"]
    if isinstance(dec, Coefficients):
        payload["coefficients"] = {n: str(c) for n, c in zip(names, dec)}
        terms = [f"{c}*{n}" for n, c in zip(names, dec) if c != 0]
        lines.append("  = " + (" + ".join(terms) if terms else "0"))
    else:
        payload["not_in_span"] = dec.describe()
        lines.append(f"  not in span: {dec.describe()}")
    _emit(out, payload, args.json, lines)
    return EXIT_OK


def _transform_grid(model, count=10):
    lo, hi = model.window
    ts = np.linspace(lo, hi, count)
    xs = np.linspace(0.5, 1.5, count)
    vs = np.linspace(-1.0, 1.0, count)
    return [(float(t), [float(x), float(v)]) for t in ts for x in xs for v in vs]


def cmd_transform(args, out) -> int:
    model = load_model(args.model)
    args.control = model.control_name(args.control)
    h = model.control(args.control)
    try:
        closed = push_forward_affine_closed_form(h, model.system)
    except (DimensionMismatch, AttributeError) as exc:
        raise UsageError(f"no closed-form transform for this model: {exc}") from None
    names = model.V.names()
    coeffs = {n: str(c) for n, c in zip(names, closed.coefficients)}
    payload = {"model": model.name, "control": args.control, "coefficients": coeffs}
    lines = [f"{args.control}* of {model.name}:"] + [f"  {n}: {c}" for n, c in coeffs.items()]
    code = EXIT_OK
    if args.compare_numeric:
        numeric = push_forward_numeric(h, model.system)
        worst, where = 0.0, None
        for t, y in _transform_grid(model):
            d = float(np.max(np.abs(np.asarray(closed(t, y)) - np.asarray(numeric(t, y)))))
            if where is None or d > worst:
                worst, where = d, (t, y)
        ok = worst <= args.threshold
        payload["numeric_check"] = {"max_abs_error": worst, "at": [where[0], *where[1]], "pass": ok}
        lines.append(f"numeric cross-check: sup error {worst:.3e} at t={where[0]:.6g}, y={where[1]}"
                     f"  {'PASS' if ok else 'FAIL'}")
        code = EXIT_OK if ok else EXIT_FAIL
    _emit(out, payload, args.json, lines)
    return code


def cmd_integrate(args, out) -> int:
    model = load_model(args.model)
    if not 0 <= args.state < len(model.initial_states):
        raise UsageError(f"state index {args.state} out of range 0..{len(model.initial_states) - 1}")
    lo, hi = model.window
    t0 = lo if args.t0 is None else args.t0
    t1 = hi if args.t1 is None else args.t1
    traj = model.integrate(args.state, t0, t1, _config(args))
    try:
        traj.to_csv(args.out)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from None
    out.write(f"wrote {len(traj.times)} nodes on [{traj.t0:.6g}, {traj.t1:.6g}] to {args.out}\n")
    return EXIT_OK


def _report_output(out, title, reports, as_json):
    payload = [r.to_dict() for r in reports]
    lines = [title] + ["  " + r.line() for r in reports]
    _emit(out, payload, as_json, lines)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_verify_invariants(args, out) -> int:
    model = load_model(args.model)
    if not model.invariants:
        raise UsageError(f"model {model.name} lists no invariants")
    window = tuple(args.window) if args.window else None
    if window is not None and not window[0] < window[1]:
        raise UsageError("--window needs a < b")
    reports = model.invariant_reports(window, args.threshold, args.samples, _config(args))
    return _report_output(out, f"invariant drift for {model.name}", reports, args.json)


def cmd_verify_superposition(args, out) -> int:
    model = load_model(args.model)
    rule = model.rule(args.rule)
    thr = args.threshold if args.threshold is not None else (rule.threshold or DEFAULT_THRESHOLD)
    reports = rule.run(model, _config(args), args.sign, args.samples, thr)
    return _report_output(out, f"superposition rule {rule.name} for {model.name}", reports, args.json)


def cmd_verify_laws(args, out) -> int:
    model = load_model(args.model)
    args.control = model.control_name(args.control)
    g = model.control(args.control)
    h = compose_flows(g, g)
    lo, hi = model.window
    ts = np.linspace(lo, hi, 5)
    grid = [(float(t), s) for t in ts for s in model.initial_states]
    thr = args.threshold if args.threshold is not None else DEFAULT_THRESHOLD
    report = verify_flow_laws(g, h, model.system, grid, thr, min(1.0, hi - lo), _config(args))
    payload = report.to_list()
    lines = [f"flow laws for control {args.control} of {model.name}"]
    lines += [f"  {d['name']:<28} {d['max_abs_drift']:.3e}  {'PASS' if d['pass'] else 'FAIL'}" for d in payload]
    _emit(out, payload, args.json, lines)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_catalog_list(args, out) -> int:
    for name, desc in catalog.list_models():
        out.write(f"{name:<32} {desc}\n")
    return EXIT_OK


def cmd_catalog_emit(args, out) -> int:
    try:
        catalog.emit(args.name, args.out)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from None
    out.write(f"wrote {args.name} to {args.out}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _tolerances(p):
    p.add_argument("--rtol", type=float, default=IntegratorConfig.rel_tol, help="relative tolerance")
    p.add_argument("--atol", type=float, default=IntegratorConfig.abs_tol, help="absolute tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quasilie", description="Quasi-Lie schemes: bracket checks, flows and verification.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    scheme = sub.add_parser("scheme", help="scheme axioms")
    ssub = scheme.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ssub.add_parser("check", help="check W in V, [W, W] in W, [W, V] in V")
    p.add_argument("model")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_scheme_check)

    p = sub.add_parser("bracket", help="Lie bracket of two basis fields")
    p.add_argument("model")
    p.add_argument("--left", required=True, help="basis field name or 1-based index")
    p.add_argument("--right", required=True, help="basis field name or 1-based index")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("transform", help="transformed coefficients under a control")
    p.add_argument("model")
    p.add_argument("--control", default=None)
    p.add_argument("--compare-numeric", action="store_true")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("integrate", help="integrate one initial state to CSV")
    p.add_argument("model")
    p.add_argument("--state", type=int, default=0, help="index into the model's initial states")
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--t1", type=float, default=None)
    _tolerances(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_integrate)

    verify = sub.add_parser("verify", help="numerical verification")
    vsub = verify.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = vsub.add_parser("invariants", help="drift of the model's invariants")
    p.add_argument("model")
    p.add_argument("--window", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--threshold", type=float, default=None,
                   help=f"relative drift bound (default: per invariant, else {DEFAULT_THRESHOLD:g})")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    _tolerances(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify_invariants)

    p = vsub.add_parser("superposition", help="superposition rule against direct integration")
    p.add_argument("model")
    p.add_argument("--rule", required=True)
    p.add_argument("--sign", choices=("auto", "plus", "minus"), default="auto")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    _tolerances(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify_superposition)

    p = vsub.add_parser("laws", help="action, transport and autonomisation laws of a control")
    p.add_argument("model")
    p.add_argument("--control", default=None)
    p.add_argument("--threshold", type=float, default=None)
    _tolerances(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify_laws)

    cat = sub.add_parser("catalog", help="built-in models")
    csub = cat.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = csub.add_parser("list")
    p.set_defaults(func=cmd_catalog_list)
    p = csub.add_parser("emit")
    p.add_argument("name")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_catalog_emit)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return args.func(args, out)
    except (UsageError, ModelFileError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        err.write(f"numerical failure in {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    except QuasiLieError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
