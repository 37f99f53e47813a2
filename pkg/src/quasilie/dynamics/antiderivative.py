"""Antiderivatives F(t) = base_value + integral of f from base_t to t."""
from __future__ import annotations

import math
import threading
from fractions import Fraction

from ..errors import DomainError, NotExact, WindowError
from ..timedep import expr as E
from ..timedep.functions import ExpressionFunction, ScalarTimeFunction, as_time_function
from .integrator import IntegratorConfig, integrate_ivp

# quadrature is a scalar ODE, so it can afford tolerances well below the default
QUADRATURE_CONFIG = IntegratorConfig(rel_tol=1e-13, abs_tol=1e-15)


class Antiderivative(ScalarTimeFunction):
    """F with F(base_t) = base_value and F' = f, integrated lazily on ``window``.

    Both halves of the window (left and right of base_t) are integrated once on
    first use, under a lock, and then only read.
    """

    def __init__(self, f: ScalarTimeFunction, base_t=0, base_value=0, window=None, name=None,
                 config: IntegratorConfig = QUADRATURE_CONFIG):
        self.f = f
        self.base_t = base_t
        self.base_value = base_value
        window = tuple(window) if window is not None else f.window
        if not all(math.isfinite(w) for w in window):
            raise WindowError(f"antiderivative of {f.label()} needs a finite window, got {window}")
        if not window[0] <= float(base_t) <= window[1]:
            raise WindowError(f"base point {base_t} outside window {window}")
        self.window = window
        self.name = name
        self.config = config
        self._lock = threading.Lock()
        self._left = self._right = None

    def label(self):
        return self.name or f"int({self.f.label()})"

    def _build(self):
        with self._lock:
            if self._right is not None:
                return
            t0 = float(self.base_t)
            y0 = [float(self.base_value)]
            f = self.f

            def rhs(t, _y):
                return [f(t)]

            lo, hi = self.window
            left = integrate_ivp(rhs, t0, lo, y0, self.config) if lo < t0 else None
            right = integrate_ivp(rhs, t0, hi, y0, self.config) if hi > t0 else None
            self._left = left
            self._right = right if right is not None else False

    def _eval(self, t):
        if t == float(self.base_t):
            return float(self.base_value)
        if self._right is None:
            self._build()
        traj = self._right if t > float(self.base_t) else self._left
        if not traj:
            raise DomainError(f"{self.label()} not available at t={t!r}")
        return traj.dense(t)[0]

    def derivative(self):
        return self.f

    def eval_exact(self, t) -> Fraction:
        if Fraction(t) == Fraction(self.base_t):
            return Fraction(self.base_value)
        raise NotExact(f"{self.label()} is only known exactly at its base point")

    def with_window(self, window):
        return Antiderivative(self.f, self.base_t, self.base_value, window, self.name, self.config)


def antiderivative(f, base_t=0, base_value=0, window=None, closed_form=None, name=None) -> ScalarTimeFunction:
    """Return F with F(base_t) = base_value and F' = f.

    ``closed_form`` (an expression string or ScalarTimeFunction) takes
    precedence over quadrature. Constant integrands are integrated exactly.
    """
    f = as_time_function(f)
    win = tuple(window) if window is not None else f.window
    if closed_form is not None:
        F = as_time_function(closed_form, window=win)
        return _Registered(F, f, name)
    if isinstance(f, ExpressionFunction) and f.is_constant():
        c = f.node
        node = E.add(E.num(base_value) if not isinstance(base_value, float) else E.Num(base_value),
                     E.mul(c, E.sub(E.Var("t"), E.num(base_t) if not isinstance(base_t, float)
                                    else E.Num(base_t))))
        return _Registered(ExpressionFunction(node, window=win), f, name)
    return Antiderivative(f, base_t, base_value, win, name)


class _Registered(ScalarTimeFunction):
    """A closed-form antiderivative whose derivative is reported as the integrand."""

    def __init__(self, F: ScalarTimeFunction, f: ScalarTimeFunction, name=None):
        self.F = F
        self.f = f
        self.window = F.window
        self.name = name

    def _eval(self, t):
        return self.F._eval(t)

    def label(self):
        return self.name or self.F.label()

    def derivative(self):
        return self.f

    def eval_exact(self, t):
        return self.F.eval_exact(t)

    def as_node(self):
        if isinstance(self.F, ExpressionFunction):
            return self.F.node
        return super().as_node()

    def with_window(self, window):
        return _Registered(self.F.with_window(window), self.f.with_window(window), self.name)
