"""Time-dependent vector fields X_t = sum_a b_a(t) X_a and derived numeric fields."""
from __future__ import annotations

from typing import Callable, Sequence

from ..errors import DimensionMismatch
from ..fields import FieldSpace, SymbolicVectorField, _compile_components
from .functions import ScalarTimeFunction, as_time_function


class NumericField:
    """Any evaluable time-dependent field ``f(t, x) -> list`` of dimension ``dim``."""

    def __init__(self, fn: Callable, dim: int, name: str | None = None):
        self.fn = fn
        self.dim = dim
        self.name = name

    def __call__(self, t, x):
        return self.fn(t, x)

    def __repr__(self):
        return f"<NumericField {self.name or ''} dim={self.dim}>"


class TimeDependentField:
    """Basis fields of a FieldSpace paired with scalar coefficient functions."""

    def __init__(self, space: FieldSpace, coefficients: Sequence, name: str | None = None):
        if len(coefficients) != space.dimension:
            raise DimensionMismatch(
                f"{len(coefficients)} coefficients for a space of dimension {space.dimension}"
            )
        self.space = space
        self.coefficients = tuple(as_time_function(c) for c in coefficients)
        self.name = name
        self._terms = [(c, B.compiled()) for c, B in zip(self.coefficients, space.basis)]
        self._jac = None

    @property
    def dim(self) -> int:
        return len(self.space.variables)

    @property
    def variables(self) -> tuple:
        return self.space.variables

    def __call__(self, t, x):
        return eval_tdf(self, t, x)

    def coefficient_values(self, t) -> list:
        return [c(t) for c in self.coefficients]

    def jacobian(self, t, x) -> list:
        """d(X_t)^i / dx^j as a nested list (symbolic partials, float evaluation)."""
        if self._jac is None:
            comps = []
            for B in self.space.basis:
                flat = [p for row in B.jacobian() for p in row]
                comps.append(_compile_components(flat, B.variables))
            self._jac = comps
        n = self.dim
        out = [[0.0] * n for _ in range(n)]
        for c, jac in zip(self.coefficients, self._jac):
            b = c(t)
            if b == 0.0:
                continue
            flat = jac(*x)
            for i in range(n):
                row = out[i]
                for j in range(n):
                    row[j] += b * flat[i * n + j]
        return out

    def frozen_at(self, t) -> SymbolicVectorField:
        """Exact field X_t when every coefficient evaluates exactly at t."""
        return self.space.combination([c.eval_exact(t) for c in self.coefficients])

    def with_coefficients(self, coefficients) -> "TimeDependentField":
        return TimeDependentField(self.space, coefficients, name=self.name)

    def __repr__(self):
        names = self.space.names()
        terms = " + ".join(f"({c.label()})*{n}" for c, n in zip(self.coefficients, names))
        return f"<TimeDependentField {terms}>"


def eval_tdf(X: TimeDependentField, t: float, x: Sequence[float]) -> list:
    n = X.dim
    if len(x) != n:
        raise DimensionMismatch(f"state has {len(x)} entries, field has dimension {n}")
    out = [0.0] * n
    for coeff, fn in X._terms:
        b = coeff(t)
        if b == 0.0:
            continue
        vals = fn(*x)
        for i in range(n):
            out[i] += b * vals[i]
    return out


def autonomise(X) -> NumericField:
    """Suspension d/dt + X_t on R x R^n; the time argument of the result is ignored."""
    n = X.dim

    def fn(_s, z):
        if len(z) != n + 1:
            raise DimensionMismatch(f"expected {n + 1} coordinates, got {len(z)}")
        return [1.0] + list(X(z[0], z[1:]))

    return NumericField(fn, n + 1, name=f"autonomised {getattr(X, 'name', None) or ''}".strip())


def diagonal_prolongation(X, copies: int) -> NumericField:
    """Block-diagonal copy of X acting on (x_(0), ..., x_(m)) with ``copies = m + 1``."""
    if copies < 1:
        raise ValueError("copies must be at least 1")
    n = X.dim

    def fn(t, z):
        if len(z) != n * copies:
            raise DimensionMismatch(f"expected {n * copies} coordinates, got {len(z)}")
        out = []
        for a in range(copies):
            out.extend(X(t, z[a * n:(a + 1) * n]))
        return out

    return NumericField(fn, n * copies, name=f"{copies}-fold prolongation")
