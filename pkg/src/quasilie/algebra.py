"""Exact arithmetic: multivariate polynomials and rational functions over Q.

Coefficients are :class:`fractions.Fraction` values, so every bracket and
span computation built on top of this module is free of rounding error.
Rational functions are kept as an (unreduced) numerator/denominator pair;
only cheap normalisations are applied (monomial content, constant and
leading-coefficient scaling) and equality is decided by cross-multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import (
    DimensionMismatch,
    DivisionByZeroFunction,
    PoleError,
    UnknownVariable,
)

POLE_TOLERANCE = 1e-14


def as_fraction(value) -> Fraction:
    """Convert an int/Fraction/decimal string to an exact Fraction.

    Floats are accepted only when they are integral; silently turning 0.1 into
    3602879701896397/36028797018963968 is almost never what the caller wants.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        if value.is_integer():
            return Fraction(int(value))
        raise TypeError(f"refusing to convert non-integral float {value!r} to an exact rational")
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class Polynomial:
    """Sparse multivariate polynomial with exact rational coefficients.

    ``terms`` maps exponent tuples (one entry per variable) to non-zero
    Fractions. Instances are immutable.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        variables = tuple(variables)
        clean: dict[tuple, Fraction] = {}
        nvars = len(variables)
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise DimensionMismatch(
                    f"exponent vector {exps} does not match {nvars} variables"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in polynomial term {exps}")
            c = as_fraction(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, value, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(variables, {})

    @classmethod
    def variable(cls, name: str, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        if name not in variables:
            raise UnknownVariable(f"{name!r} is not one of {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    @classmethod
    def monomial(cls, exponents: Sequence[int], variables: Sequence[str], coeff=1) -> "Polynomial":
        return cls(variables, {tuple(exponents): coeff})

    # queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exponents), Fraction(0))

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.terms[max(self.terms)]

    def min_exponents(self) -> tuple:
        if not self.terms:
            return (0,) * len(self.variables)
        return tuple(min(col) for col in zip(*self.terms))

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise DimensionMismatch(
                    f"variable lists differ: {self.variables} vs {other.variables}"
                )
            return other
        return Polynomial.constant(as_fraction(other), self.variables)

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Polynomial(self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        other = self._coerce(other)
        terms: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        c = as_fraction(c)
        return Polynomial(self.variables, {e: v * c for e, v in self.terms.items()})

    def divide_monomial(self, exponents: Sequence[int]) -> "Polynomial":
        """Exact division by the monomial with the given exponents."""
        exponents = tuple(exponents)
        terms = {}
        for e, c in self.terms.items():
            q = tuple(a - b for a, b in zip(e, exponents))
            if any(x < 0 for x in q):
                raise ValueError("monomial does not divide polynomial")
            terms[q] = c
        return Polynomial(self.variables, terms)

    def partial(self, var: str) -> "Polynomial":
        try:
            i = self.variables.index(var)
        except ValueError:
            raise UnknownVariable(f"{var!r} is not one of {self.variables}") from None
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                terms[tuple(d)] = c * e[i]
        return Polynomial(self.variables, terms)

    def evaluate(self, point: Sequence[float]) -> float:
        if len(point) != len(self.variables):
            raise DimensionMismatch(
                f"point has {len(point)} entries, expected {len(self.variables)}"
            )
        total = 0.0
        for e, c in self.terms.items():
            term = float(c)
            for xi, ei in zip(point, e):
                if ei:
                    term *= xi**ei
            total += term
        return total

    def evaluate_exact(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for xi, ei in zip(point, e):
                if ei:
                    term *= as_fraction(xi) ** ei
            total += term
        return total

    def to_source(self, names: Sequence[str] | None = None) -> str:
        """Python source evaluating this polynomial in floating point."""
        names = tuple(names or self.variables)
        if not self.terms:
            return "0.0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            factors = [repr(float(c))]
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}**{k}")
            parts.append("*".join(factors))
        return "(" + " + ".join(parts) + ")"

    # comparison / display -------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(other, self.variables)
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.variables, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                name if k == 1 else f"{name}^{k}"
                for name, k in zip(self.variables, e)
                if k
            )
            if not mono:
                out.append(_fmt_coeff(c))
            elif c == 1:
                out.append(mono)
            elif c == -1:
                out.append("-" + mono)
            else:
                out.append(f"{_fmt_coeff(c)}*{mono}")
        return " + ".join(out).replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({str(self)!r}, vars={self.variables})"


class RationalFunction:
    """Quotient of two polynomials over the same variable list.

    Not gcd-reduced: equality is cross-multiplication, so ``x/x == 1`` holds
    even though the stored pair is left alone apart from monomial content.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.constant(1, num.variables)
        if num.variables != den.variables:
            raise DimensionMismatch("numerator and denominator use different variables")
        if den.is_zero():
            raise DivisionByZeroFunction("denominator is the zero polynomial")
        if num.is_zero():
            den = Polynomial.constant(1, num.variables)
        else:
            common = tuple(min(a, b) for a, b in zip(num.min_exponents(), den.min_exponents()))
            if any(common):
                num = num.divide_monomial(common)
                den = den.divide_monomial(common)
            lead = den.leading_coefficient()
            if lead != 1:
                inv = 1 / lead
                num = num.scale(inv)
                den = den.scale(inv)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @property
    def variables(self) -> tuple:
        return self.num.variables

    @classmethod
    def constant(cls, value, variables: Sequence[str]) -> "RationalFunction":
        return cls(Polynomial.constant(value, variables))

    @classmethod
    def variable(cls, name: str, variables: Sequence[str]) -> "RationalFunction":
        return cls(Polynomial.variable(name, variables))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.variables != self.variables:
                raise DimensionMismatch(
                    f"variable lists differ: {self.variables} vs {other.variables}"
                )
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(self.num._coerce(other))
        return RationalFunction.constant(as_fraction(other), self.variables)

    def __add__(self, other):
        other = self._coerce(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise DivisionByZeroFunction("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("rational function powers must be integers")
        if k >= 0:
            return RationalFunction(self.num**k, self.den**k)
        if self.is_zero():
            raise DivisionByZeroFunction("negative power of the zero function")
        return RationalFunction(self.den ** (-k), self.num ** (-k))

    def partial(self, var: str) -> "RationalFunction":
        dn = self.num.partial(var)
        dd = self.den.partial(var)
        if dd.is_zero():
            return RationalFunction(dn, self.den)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Sequence[float]) -> float:
        d = self.den.evaluate(point)
        if abs(d) <= POLE_TOLERANCE:
            raise PoleError(f"denominator {self.den} vanishes at {tuple(point)}")
        return self.num.evaluate(point) / d

    def evaluate_exact(self, point: Sequence) -> Fraction:
        d = self.den.evaluate_exact(point)
        if d == 0:
            raise PoleError(f"denominator {self.den} vanishes at {tuple(point)}")
        return self.num.evaluate_exact(point) / d

    def __eq__(self, other):
        if isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            other = self._coerce(other)
            return self.num * other.den == other.num * self.den
        return NotImplemented

    def __hash__(self):
        # Cross-multiplication equality has no cheap canonical hash.
        raise TypeError("RationalFunction is unhashable; compare with ==")

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


def ratfn_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    ops = {
        "add": RationalFunction.__add__,
        "sub": RationalFunction.__sub__,
        "mul": RationalFunction.__mul__,
        "div": RationalFunction.__truediv__,
    }
    try:
        return ops[op](a, b)
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None


def ratfn_partial(f: RationalFunction, var: str) -> RationalFunction:
    return f.partial(var)


def ratfn_eval(f: RationalFunction, point: Sequence[float]) -> float:
    return f.evaluate(point)


# --------------------------------------------------------------------------
# exact linear algebra
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UniqueSolution:
    solution: tuple


@dataclass(frozen=True)
class NoSolution:
    witness_row: int  # first equation (in input order) that makes the system inconsistent


@dataclass(frozen=True)
class Underdetermined:
    particular: tuple
    nullity: int
    null_space: tuple = field(default=(), repr=False)


def solve_linear_exact(A: Sequence[Sequence], b: Sequence):
    """Solve ``A x = b`` exactly by Gauss-Jordan elimination over Q.

    Rows are absorbed one at a time so an inconsistent system reports the
    first input row that cannot be satisfied.
    """
    m = len(A)
    if len(b) != m:
        raise DimensionMismatch(f"matrix has {m} rows but right-hand side has {len(b)}")
    ncols = len(A[0]) if m else 0
    if any(len(row) != ncols for row in A):
        raise DimensionMismatch("matrix rows have inconsistent lengths")

    pivots: list[tuple[int, list[Fraction]]] = []  # (pivot column, augmented row)
    for r, (row, rhs) in enumerate(zip(A, b)):
        aug = [as_fraction(x) for x in row] + [as_fraction(rhs)]
        for pc, prow in pivots:
            f = aug[pc]
            if f:
                aug = [x - f * y for x, y in zip(aug, prow)]
        lead = next((j for j in range(ncols) if aug[j]), None)
        if lead is None:
            if aug[ncols]:
                return NoSolution(r)
            continue
        inv = 1 / aug[lead]
        aug = [x * inv for x in aug]
        reduced = []
        for pc, prow in pivots:
            f = prow[lead]
            if f:
                prow = [x - f * y for x, y in zip(prow, aug)]
            reduced.append((pc, prow))
        pivots = reduced + [(lead, aug)]

    x = [Fraction(0)] * ncols
    for pc, prow in pivots:
        x[pc] = prow[ncols]
    rank = len(pivots)
    if rank == ncols:
        return UniqueSolution(tuple(x))
    pivot_cols = {pc for pc, _ in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for pc, prow in pivots:
            vec[pc] = -prow[free]
        basis.append(tuple(vec))
    return Underdetermined(tuple(x), ncols - rank, tuple(basis))


def matvec_exact(A: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(sum((as_fraction(a) * as_fraction(xi) for a, xi in zip(row, x)), Fraction(0)) for row in A)


def polynomial_from_terms(variables: Iterable[str], terms: Mapping[tuple, object]) -> Polynomial:
    return Polynomial(tuple(variables), terms)
