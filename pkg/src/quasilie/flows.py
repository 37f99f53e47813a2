"""Generalized flows, their group operations, and the action on time-dependent fields.

Orientation: ``forward`` maps old coordinates to new ones. For the affine
family the forward map is x' = x/gamma, v' = (v - beta*x/gamma)/alpha, and
``display_map`` is its inverse x = gamma*x', v = alpha*v' + beta*x'.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .bases import basis_exponent
from .errors import DimensionMismatch, DomainError, MissingDerivative, SingularJacobian
from .timedep import expr as E
from .timedep.functions import DT_REL, CentralDifference, ExpressionFunction, ScalarTimeFunction, as_time_function
from .timedep.tdfield import NumericField, TimeDependentField

DX_REL = 1e-6
GROUP_TOL = 1e-12
COND_LIMIT = 1e13


def _solve(J, b):
    J = np.asarray(J, dtype=float)
    try:
        if np.linalg.cond(J) > COND_LIMIT:
            raise SingularJacobian(f"Jacobian is numerically singular: {J.tolist()}")
        return np.linalg.solve(J, np.asarray(b, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise SingularJacobian(str(exc)) from None


def fd_jacobian(fn: Callable, t: float, x: Sequence[float], rel: float = DX_REL) -> np.ndarray:
    """Central-difference Jacobian of x -> fn(t, x)."""
    x = [float(v) for v in x]
    n = len(x)
    cols = []
    for j in range(n):
        h = rel * max(1.0, abs(x[j]))
        xp, xm = list(x), list(x)
        xp[j] += h
        xm[j] -= h
        cols.append((np.asarray(fn(t, xp)) - np.asarray(fn(t, xm))) / (2 * h))
    return np.column_stack(cols) if cols else np.zeros((0, 0))


class GeneralizedFlow:
    """Time-indexed family of local diffeomorphisms x -> g_t(x) on R^n.

    Missing Jacobians and time derivatives are supplied by central
    differences (time step DT_REL * max(1, |t|)).
    """

    def __init__(self, forward: Callable, inverse: Callable, dim: int, jacobian: Callable | None = None,
                 time_derivative: Callable | None = None, window=(-math.inf, math.inf),
                 name: str | None = None, dt_rel: float = DT_REL):
        self._forward = forward
        self._inverse = inverse
        self._jacobian = jacobian
        self._time_derivative = time_derivative
        self.dim = dim
        self.window = tuple(window)
        self.name = name
        self.dt_rel = dt_rel

    def _check(self, t, x):
        lo, hi = self.window
        if not lo <= t <= hi:
            raise DomainError(f"t={t!r} outside the window [{lo}, {hi}] of flow {self.name or ''}".rstrip())
        if len(x) != self.dim:
            raise DimensionMismatch(f"point has {len(x)} coordinates, flow acts on R^{self.dim}")

    def forward(self, t, x) -> list:
        self._check(t, x)
        return list(self._forward(t, list(x)))

    def inverse(self, t, y) -> list:
        self._check(t, y)
        return list(self._inverse(t, list(y)))

    def jacobian(self, t, x) -> np.ndarray:
        self._check(t, x)
        if self._jacobian is not None:
            return np.asarray(self._jacobian(t, list(x)), dtype=float)
        return fd_jacobian(self._forward, t, x)

    def time_derivative(self, t, x) -> np.ndarray:
        """d/dt g_t(x) at fixed x."""
        self._check(t, x)
        if self._time_derivative is not None:
            return np.asarray(self._time_derivative(t, list(x)), dtype=float)
        h = self.dt_rel * max(1.0, abs(t))
        x = list(x)
        return (np.asarray(self._forward(t + h, x)) - np.asarray(self._forward(t - h, x))) / (2 * h)

    def is_normalized(self, points: Sequence[Sequence[float]], tol: float = 1e-12) -> bool:
        """g_0 = id on the given sample points."""
        return all(max(abs(a - b) for a, b in zip(self.forward(0.0, p), p)) <= tol for p in points)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name or ''} dim={self.dim}>"


def identity_flow(dim: int) -> GeneralizedFlow:
    return GeneralizedFlow(lambda t, x: list(x), lambda t, y: list(y), dim,
                           jacobian=lambda t, x: np.eye(dim),
                           time_derivative=lambda t, x: np.zeros(dim), name="identity")


def apply_flow(g: GeneralizedFlow, t: float, x: Sequence[float], direction: str = "forward") -> list:
    if direction == "forward":
        return g.forward(t, x)
    if direction == "inverse":
        return g.inverse(t, x)
    raise ValueError(f"direction must be 'forward' or 'inverse', not {direction!r}")


def _intersect(w1, w2):
    return (max(w1[0], w2[0]), min(w1[1], w2[1]))


def compose_flows(g: GeneralizedFlow, h: GeneralizedFlow) -> GeneralizedFlow:
    """(g o h)_t = g_t o h_t."""
    if g.dim != h.dim:
        raise DimensionMismatch(f"cannot compose flows on R^{g.dim} and R^{h.dim}")
    if isinstance(g, AffineFlow2D) and isinstance(h, AffineFlow2D):
        # display maps compose in reverse: x = g2 g1 x'', v = a2 a1 v'' + (a2 b1 + g1 b2) x''
        return AffineFlow2D(g.alpha * h.alpha, h.alpha * g.beta + g.gamma * h.beta, g.gamma * h.gamma,
                            name=f"{g.name or 'g'}*{h.name or 'h'}")

    def fwd(t, x):
        return g.forward(t, h.forward(t, x))

    def inv(t, y):
        return h.inverse(t, g.inverse(t, y))

    def jac(t, x):
        return g.jacobian(t, h.forward(t, x)) @ h.jacobian(t, x)

    def dot(t, x):
        y = h.forward(t, x)
        return g.time_derivative(t, y) + g.jacobian(t, y) @ h.time_derivative(t, x)

    return GeneralizedFlow(fwd, inv, g.dim, jac, dot, _intersect(g.window, h.window),
                           name=f"{g.name or 'g'}*{h.name or 'h'}")


def invert(g: GeneralizedFlow) -> GeneralizedFlow:
    """(g^-1)_t = (g_t)^-1."""
    if isinstance(g, AffineFlow2D):
        a, b, c = g.alpha, g.beta, g.gamma
        return AffineFlow2D(1 / a, -b / (a * c), 1 / c, name=f"{g.name or 'g'}^-1")

    def jac(t, y):
        return np.linalg.inv(g.jacobian(t, g.inverse(t, y)))

    def dot(t, y):
        x = g.inverse(t, y)
        return -_solve(g.jacobian(t, x), g.time_derivative(t, x))

    return GeneralizedFlow(g.inverse, g.forward, g.dim, jac, dot, g.window, name=f"{g.name or 'g'}^-1")


def _derivative(f: ScalarTimeFunction, allow_numeric: bool) -> ScalarTimeFunction:
    try:
        return f.derivative()
    except MissingDerivative:
        if not allow_numeric:
            raise
    return CentralDifference(f)


class AffineFlow2D(GeneralizedFlow):
    """x' = x/gamma(t), v' = (v - beta(t) x/gamma(t))/alpha(t) on (x, v)."""

    def __init__(self, alpha, beta, gamma, window=None, name: str | None = None,
                 numeric_derivatives: bool = True):
        self.alpha = as_time_function(alpha)
        self.beta = as_time_function(beta)
        self.gamma = as_time_function(gamma)
        if window is None:
            window = _intersect(_intersect(self.alpha.window, self.beta.window), self.gamma.window)
        self.numeric_derivatives = numeric_derivatives
        self._dots = None
        super().__init__(self._fwd, self._inv, 2, self._jac, self._tdot, window, name=name)
        self.in_group = self._group_member()

    def _group_member(self) -> bool:
        lo, hi = self.window
        if not lo <= 0 <= hi:
            return False
        try:
            return (abs(self.alpha(0.0) - 1) <= GROUP_TOL and abs(self.gamma(0.0) - 1) <= GROUP_TOL
                    and abs(self.beta(0.0)) <= GROUP_TOL)
        except DomainError:
            return False

    def params(self, t):
        a, b, c = self.alpha(t), self.beta(t), self.gamma(t)
        if not (a > 0 and c > 0):
            raise DomainError(f"alpha={a!r} and gamma={c!r} must be positive at t={t!r}")
        return a, b, c

    def derivatives(self):
        """(alpha', beta', gamma') as functions of time."""
        if self._dots is None:
            nd = self.numeric_derivatives
            self._dots = tuple(_derivative(f, nd) for f in (self.alpha, self.beta, self.gamma))
        return self._dots

    def _fwd(self, t, p):
        a, b, c = self.params(t)
        x, v = p
        xp = x / c
        return [xp, (v - b * xp) / a]

    def _inv(self, t, p):
        a, b, c = self.params(t)
        xp, vp = p
        return [c * xp, a * vp + b * xp]

    def display_map(self, t, p) -> list:
        """New coordinates to old ones: x = gamma x', v = alpha v' + beta x'."""
        self._check(t, p)
        return self._inv(t, p)

    def _jac(self, t, p):
        a, b, c = self.params(t)
        return np.array([[1 / c, 0.0], [-b / (a * c), 1 / a]])

    def _tdot(self, t, p):
        a, b, c = self.params(t)
        da, db, dc = (f(t) for f in self.derivatives())
        x, v = p
        xp = x / c
        dxp = -dc * x / (c * c)
        vp = (v - b * xp) / a
        dvp = -(db * xp + b * dxp) / a - da / a * vp
        return np.array([dxp, dvp])


class ScalingFlow2D(AffineFlow2D):
    """x' = x, v' = v/alpha(t)."""

    def __init__(self, alpha, window=None, name: str | None = None, numeric_derivatives: bool = True):
        super().__init__(alpha, 0, 1, window=window, name=name, numeric_derivatives=numeric_derivatives)


# ---------------------------------------------------------------------------
# action on time-dependent fields
# ---------------------------------------------------------------------------


def push_forward_numeric(h: GeneralizedFlow, X) -> NumericField:
    """(h*X)_t(y) = dh_t/dt(x) + Dh_t(x) X_t(x) with x = h_t^-1(y)."""
    if h.dim != X.dim:
        raise DimensionMismatch(f"flow on R^{h.dim} cannot act on a field on R^{X.dim}")

    def fn(t, y):
        x = h.inverse(t, y)
        return (h.time_derivative(t, x) + h.jacobian(t, x) @ np.asarray(X(t, x), dtype=float)).tolist()

    field = NumericField(fn, X.dim, name=f"{h.name or 'h'}*{getattr(X, 'name', None) or 'X'}")
    field.variables = getattr(X, "variables", None)
    return field


def push_forward_affine_closed_form(h: AffineFlow2D, X: TimeDependentField,
                                    numeric_derivatives: bool | None = None) -> TimeDependentField:
    """Transformed coefficients of X = a X4 + b X1 + c X2 + d X3 + e X5 under h.

    Substituting x = gamma x', v = alpha v' + beta x' gives
      d' = d alpha/gamma,   e' = (d beta + e gamma - gamma')/gamma,
      a' = a - alpha'/alpha - beta d/gamma,
      b' = (a beta + b gamma - beta' - beta e')/alpha,
      c' = c gamma^n/alpha.
    """
    n = basis_exponent(X.space)
    if n is None:
        raise DimensionMismatch("closed-form pushforward needs a field over the five-element affine basis")
    if numeric_derivatives is not None and numeric_derivatives != h.numeric_derivatives:
        h = AffineFlow2D(h.alpha, h.beta, h.gamma, h.window, h.name, numeric_derivatives)
    da, db, dg = (f.as_node() for f in h.derivatives())
    al, be, ga = h.alpha.as_node(), h.beta.as_node(), h.gamma.as_node()
    b, c, d, a, e = (f.as_node() for f in X.coefficients)
    d2 = E.div(E.mul(d, al), ga)
    e2 = E.div(E.sub(E.add(E.mul(d, be), E.mul(e, ga)), dg), ga)
    a2 = E.sub(E.sub(a, E.div(da, al)), E.div(E.mul(be, d), ga))
    b2 = E.div(E.sub(E.sub(E.add(E.mul(a, be), E.mul(b, ga)), db), E.mul(be, e2)), al)
    c2 = E.div(E.mul(c, E.power(ga, E.num(n))), al)
    coeffs = [b2, c2, d2, a2, e2]
    window = _intersect(h.window, _window_of(X))
    return TimeDependentField(X.space, [ExpressionFunction(k, window=window) for k in coeffs],
                              name=f"{h.name or 'h'}*{X.name or 'X'}")


def _window_of(X):
    w = (-math.inf, math.inf)
    for c in getattr(X, "coefficients", ()):
        w = _intersect(w, c.window)
    return w


# ---------------------------------------------------------------------------
# flows generated by fields
# ---------------------------------------------------------------------------


def flow_of(X, base_t: float = 0.0, config=None) -> GeneralizedFlow:
    """g^X: g_t(x) is the solution at t of x' = X(t, x) with value x at base_t.

    The Jacobian comes from the variational equation when X provides a
    ``jacobian(t, x)`` method and from central differences otherwise.
    """
    from .dynamics import IntegratorConfig, integrate_ivp

    cfg = config or IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    n = X.dim

    def fwd(t, x):
        if t == base_t:
            return list(x)
        return integrate_ivp(X, base_t, t, x, cfg).dense(t)

    def inv(t, y):
        if t == base_t:
            return list(y)
        return integrate_ivp(X, t, base_t, y, cfg).dense(base_t)

    def dot(t, x):
        return np.asarray(X(t, fwd(t, x)), dtype=float)

    jac = None
    if hasattr(X, "jacobian"):
        def variational(t, z):
            x = z[:n]
            J = np.asarray(X.jacobian(t, x))
            Phi = np.asarray(z[n:]).reshape(n, n)
            return list(X(t, x)) + (J @ Phi).ravel().tolist()

        def jac(t, x):
            if t == base_t:
                return np.eye(n)
            z0 = list(x) + np.eye(n).ravel().tolist()
            z = integrate_ivp(variational, base_t, t, z0, cfg).dense(t)
            return np.asarray(z[n:]).reshape(n, n)

    return GeneralizedFlow(fwd, inv, n, jac, dot, name=f"flow of {getattr(X, 'name', None) or 'X'}")


def right_log_derivative(g: GeneralizedFlow, t: float, y: Sequence[float], dt_rel: float = DT_REL) -> list:
    """(dg_t/dt o g_t^-1)(y) estimated by central differences in t."""
    x = g.inverse(t, y)
    h = dt_rel * max(1.0, abs(t))
    return ((np.asarray(g.forward(t + h, x)) - np.asarray(g.forward(t - h, x))) / (2 * h)).tolist()


def inverse_field(X, config=None, flow: GeneralizedFlow | None = None) -> NumericField:
    """X^-1_t(y) = -[D g_t(y)]^-1 X_t(g_t(y)), the field whose flow is (g^X)^-1."""
    g = flow or flow_of(X, config=config)

    def fn(t, y):
        return (-_solve(g.jacobian(t, y), X(t, g.forward(t, y)))).tolist()

    field = NumericField(fn, X.dim, name=f"{getattr(X, 'name', None) or 'X'}^-1")
    return field


__all__ = [
    "GeneralizedFlow", "AffineFlow2D", "ScalingFlow2D", "identity_flow", "apply_flow", "compose_flows",
    "invert", "push_forward_numeric", "push_forward_affine_closed_form", "flow_of", "inverse_field",
    "right_log_derivative", "fd_jacobian",
]
