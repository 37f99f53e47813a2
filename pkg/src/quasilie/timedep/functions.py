"""Scalar coefficient functions of time."""
from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Callable, Mapping

from ..errors import DomainError, MissingDerivative, NotExact, UnknownVariable
from . import expr as E

INFINITE_WINDOW = (-math.inf, math.inf)

# Central-difference step for numeric time derivatives: h = DT_REL * max(1, |t|).
DT_REL = 1e-5


def _intersect(w1, w2):
    lo, hi = max(w1[0], w2[0]), min(w1[1], w2[1])
    if lo > hi:
        raise DomainError(f"time windows {w1} and {w2} do not overlap")
    return (lo, hi)


class ScalarTimeFunction:
    """Base class: a real function of t, total on ``window`` (closed interval).

    Evaluation outside the window raises DomainError, and so do non-finite
    results, so nothing downstream ever sees a silent NaN.
    """

    window: tuple = INFINITE_WINDOW
    name: str | None = None

    def __call__(self, t: float) -> float:
        lo, hi = self.window
        if not lo <= t <= hi:
            raise DomainError(f"t={t!r} outside the declared window [{lo}, {hi}] of {self.label()}")
        value = self._eval(t)
        if not math.isfinite(value):
            raise DomainError(f"{self.label()} is not finite at t={t!r}")
        return value

    def _eval(self, t: float) -> float:
        raise NotImplementedError

    def label(self) -> str:
        return self.name or type(self).__name__

    def derivative(self) -> "ScalarTimeFunction":
        raise MissingDerivative(f"{self.label()} has no derivative")

    def eval_exact(self, t) -> Fraction:
        raise NotExact(f"{self.label()} has no exact evaluation")

    def as_node(self) -> E.Node:
        """Expression tree for use inside larger expressions."""
        return E.Ref(self.name or "f", E.Var("t"), self)

    def with_window(self, window) -> "ScalarTimeFunction":
        raise NotImplementedError

    # arithmetic builds expression trees --------------------------------
    def _combine(self, other, op, reverse=False):
        a = self.as_node()
        window = self.window
        if isinstance(other, ScalarTimeFunction):
            b = other.as_node()
            window = _intersect(window, other.window)
        elif isinstance(other, numbers.Real):
            b = E.num(other if not isinstance(other, float) or not other.is_integer() else int(other))
        else:
            return NotImplemented
        if reverse:
            a, b = b, a
        return ExpressionFunction(op(a, b), window=window)

    def __add__(self, o):
        return self._combine(o, E.add)

    def __radd__(self, o):
        return self._combine(o, E.add, True)

    def __sub__(self, o):
        return self._combine(o, E.sub)

    def __rsub__(self, o):
        return self._combine(o, E.sub, True)

    def __mul__(self, o):
        return self._combine(o, E.mul)

    def __rmul__(self, o):
        return self._combine(o, E.mul, True)

    def __truediv__(self, o):
        return self._combine(o, E.div)

    def __rtruediv__(self, o):
        return self._combine(o, E.div, True)

    def __pow__(self, o):
        return self._combine(o, E.power)

    def __neg__(self):
        return ExpressionFunction(E.neg(self.as_node()), window=self.window)


def _apply(name: str, f: ScalarTimeFunction) -> "ExpressionFunction":
    return ExpressionFunction(E.call(name, f.as_node()), window=f.window)


def texp(f):
    return _apply("exp", as_time_function(f))


def tlog(f):
    return _apply("log", as_time_function(f))


def tsqrt(f):
    return _apply("sqrt", as_time_function(f))


def _inline_ref_derivative(ref: E.Ref) -> E.Node:
    d = ref.func.derivative()
    if isinstance(d, ExpressionFunction):
        if isinstance(ref.arg, E.Var) and ref.arg.name == "t":
            return d.node
        return E.substitute(d.node, "t", ref.arg)
    return E.Ref(d.name or f"{ref.name}_dot", ref.arg, d)


class ExpressionFunction(ScalarTimeFunction):
    """Function given by a bound expression tree in the single variable t."""

    def __init__(self, node: E.Node, window=INFINITE_WINDOW, name: str | None = None):
        extra = E.free_variables(node) - {"t"}
        if extra:
            raise UnknownVariable(f"unbound names {sorted(extra)} in time expression {E.to_string(node)!r}")
        self.node = node
        self.window = tuple(window)
        self.name = name
        self._fn = E.compile_expr(node, ("t",))
        self._derivative = None

    def _eval(self, t):
        try:
            return self._fn((t,))
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"{self.label()} failed at t={t!r}: {exc}") from None

    def as_node(self):
        return self.node

    def label(self):
        return self.name or E.to_string(self.node)

    def derivative(self) -> "ExpressionFunction":
        if self._derivative is None:
            node = E.diff(self.node, "t", _inline_ref_derivative)
            self._derivative = ExpressionFunction(node, window=self.window)
        return self._derivative

    def eval_exact(self, t) -> Fraction:
        return E.eval_exact(self.node, {"t": Fraction(t)})

    def with_window(self, window):
        return ExpressionFunction(self.node, window=window, name=self.name)

    def is_constant(self) -> bool:
        return not any(isinstance(n, (E.Var, E.Ref)) for n in E.walk(self.node))

    def __str__(self):
        return E.to_string(self.node)

    def __repr__(self):
        return f"ExpressionFunction({E.to_string(self.node)!r})"


class CallableFunction(ScalarTimeFunction):
    """Wrap a plain Python callable; derivative analytic if given, else central difference."""

    def __init__(self, fn: Callable[[float], float], derivative: Callable | "ScalarTimeFunction" | None = None,
                 name: str | None = None, window=INFINITE_WINDOW, numeric_derivative: bool = True,
                 dt_rel: float = DT_REL):
        self.fn = fn
        self._deriv = derivative
        self.name = name
        self.window = tuple(window)
        self.numeric_derivative = numeric_derivative
        self.dt_rel = dt_rel

    def _eval(self, t):
        try:
            return float(self.fn(t))
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"{self.label()} failed at t={t!r}: {exc}") from None

    def derivative(self) -> ScalarTimeFunction:
        d = self._deriv
        if isinstance(d, ScalarTimeFunction):
            return d
        if d is not None:
            return CallableFunction(d, name=f"{self.label()}_dot", window=self.window)
        if not self.numeric_derivative:
            raise MissingDerivative(f"{self.label()} has no analytic derivative and numeric differentiation is disabled")
        return CentralDifference(self)

    def with_window(self, window):
        return CallableFunction(self.fn, self._deriv, self.name, window, self.numeric_derivative, self.dt_rel)


class CentralDifference(ScalarTimeFunction):
    def __init__(self, base: ScalarTimeFunction, dt_rel: float = DT_REL):
        self.base = base
        self.dt_rel = dt_rel
        self.window = base.window
        self.name = f"{base.label()}_dot"

    def _eval(self, t):
        h = self.dt_rel * max(1.0, abs(t))
        return (self.base._eval(t + h) - self.base._eval(t - h)) / (2 * h)

    def derivative(self):
        return CentralDifference(self, self.dt_rel)


def constant(value) -> ExpressionFunction:
    return ExpressionFunction(E.num(value) if not isinstance(value, float) else E.Num(value))


def as_time_function(value, params: Mapping | None = None, refs: Mapping | None = None,
                     window=INFINITE_WINDOW) -> ScalarTimeFunction:
    """Coerce a string / number / callable / ScalarTimeFunction to a ScalarTimeFunction."""
    if isinstance(value, ScalarTimeFunction):
        return value
    if isinstance(value, str):
        refs = dict(refs or {})
        tree = E.parse_time_expression(value, refs=tuple(refs))
        return ExpressionFunction(E.bind(tree, params, refs), window=window)
    if isinstance(value, Fraction) or isinstance(value, int):
        return ExpressionFunction(E.num(value), window=window)
    if isinstance(value, float):
        return ExpressionFunction(E.Num(value), window=window)
    if callable(value):
        return CallableFunction(value, window=window)
    raise TypeError(f"cannot interpret {value!r} as a function of time")
