"""Concrete field spaces on the plane (x, v) shared by flows and the catalog."""
from __future__ import annotations

from fractions import Fraction

from .fields import FieldSpace, SymbolicVectorField

XV = ("x", "v")

# indices into affine_basis of Y1 = X4, Y2 = X1, Y3 = X5
AFFINE_W_INDICES = (3, 0, 4)


def _power(n: int) -> str:
    return f"x^{n}" if n >= 0 else f"x^({n})"


def affine_basis(n: int) -> FieldSpace:
    """X1 = x d/dv, X2 = x^n d/dv, X3 = v d/dx, X4 = v d/dv, X5 = x d/dx.

    ``n`` is a fixed integer different from 0 and 1 (otherwise X2 would
    coincide with X1 or vanish into constants).
    """
    if n in (0, 1):
        raise ValueError("n must differ from 0 and 1")
    f = SymbolicVectorField.from_expressions
    basis = [
        f(["0", "x"], XV),
        f(["0", _power(n)], XV),
        f(["v", "0"], XV),
        f(["0", "v"], XV),
        f(["x", "0"], XV),
    ]
    return FieldSpace(basis, names=["X1", "X2", "X3", "X4", "X5"])


def affine_w(n: int) -> FieldSpace:
    V = affine_basis(n)
    return FieldSpace([V[i] for i in AFFINE_W_INDICES], names=["Y1", "Y2", "Y3"])


def basis_exponent(space: FieldSpace):
    """Return n if ``space`` is affine_basis(n) field for field, else None."""
    if space.dimension != 5 or space.variables != XV:
        return None
    comp = space[1].components[1]
    num, den = comp.num, comp.den
    if not (len(num.terms) == 1 and len(den.terms) == 1):
        return None
    (en, cn), = num.terms.items()
    (ed, cd), = den.terms.items()
    if en[1] or ed[1] or cn / cd != 1:
        return None
    n = en[0] - ed[0]
    if n in (0, 1):
        return None
    ref = affine_basis(n)
    if all(a == b for a, b in zip(space.basis, ref.basis)):
        return n
    return None


def ml_basis(lam) -> FieldSpace:
    """X1 = v d/dx + lam x v^2/(1+lam x^2) d/dv, X2 = x/(1+lam x^2) d/dv, X3 = v d/dv."""
    p = {"lam": Fraction(lam)}
    f = SymbolicVectorField.from_expressions
    basis = [
        f(["v", "lam*x*v^2/(1 + lam*x^2)"], XV, p),
        f(["0", "x/(1 + lam*x^2)"], XV, p),
        f(["0", "v"], XV),
    ]
    return FieldSpace(basis, names=["X1", "X2", "X3"])


def riccati_basis() -> FieldSpace:
    f = SymbolicVectorField.from_expressions
    return FieldSpace([f(["1"], ("x",)), f(["x"], ("x",)), f(["x^2"], ("x",))], names=["Y0", "Y1", "Y2"])
