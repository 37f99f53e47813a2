"""Symbolic vector fields, Lie brackets and quasi-Lie scheme checks.

A field on an open subset of R^n is a tuple of exact rational functions, one
per state variable. Spans are real vector spaces of fields, so membership
tests solve for constant (rational) coefficients after bringing everything
over a common denominator.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .algebra import (
    POLE_TOLERANCE,
    NoSolution,
    Polynomial,
    RationalFunction,
    UniqueSolution,
    as_fraction,
    solve_linear_exact,
)
from .errors import DimensionMismatch, LinearDependence, PoleError


class SymbolicVectorField:
    """Vector field sum_i components[i] * d/d(variables[i])."""

    __slots__ = ("variables", "components", "name", "_compiled")

    def __init__(self, variables: Sequence[str], components: Sequence, name: str | None = None):
        variables = tuple(variables)
        comps = []
        for c in components:
            if isinstance(c, Polynomial):
                c = RationalFunction(c)
            elif not isinstance(c, RationalFunction):
                c = RationalFunction.constant(as_fraction(c), variables)
            if c.variables != variables:
                raise DimensionMismatch(
                    f"component over {c.variables} does not match field variables {variables}"
                )
            comps.append(c)
        if len(comps) != len(variables):
            raise DimensionMismatch(
                f"{len(comps)} components given for {len(variables)} variables"
            )
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_compiled", None)

    def __setattr__(self, key, value):
        raise AttributeError("SymbolicVectorField is immutable")

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "SymbolicVectorField":
        return cls(variables, [0] * len(variables))

    @classmethod
    def from_expressions(cls, exprs: Sequence[str], variables: Sequence[str],
                         params: dict | None = None, name: str | None = None):
        from .timedep.expr import rational_function_from_source

        comps = [rational_function_from_source(e, variables, params or {}) for e in exprs]
        return cls(variables, comps, name=name)

    def renamed(self, name: str) -> "SymbolicVectorField":
        return SymbolicVectorField(self.variables, self.components, name=name)

    def _check(self, other: "SymbolicVectorField"):
        if not isinstance(other, SymbolicVectorField):
            raise TypeError("expected a SymbolicVectorField")
        if other.variables != self.variables:
            raise DimensionMismatch(
                f"fields live on different coordinates: {self.variables} vs {other.variables}"
            )

    def __add__(self, other):
        self._check(other)
        return SymbolicVectorField(self.variables, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        self._check(other)
        return SymbolicVectorField(self.variables, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return SymbolicVectorField(self.variables, [-a for a in self.components])

    def scale(self, c) -> "SymbolicVectorField":
        c = as_fraction(c)
        return SymbolicVectorField(self.variables, [a * c for a in self.components])

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, SymbolicVectorField):
            return NotImplemented
        return self.variables == other.variables and all(
            a == b for a, b in zip(self.components, other.components)
        )

    __hash__ = None

    def jacobian(self) -> tuple:
        """Symbolic matrix J[i][j] = d(component i)/d(variable j)."""
        return tuple(tuple(c.partial(v) for v in self.variables) for c in self.components)

    def compiled(self):
        """Fast float evaluator ``f(point) -> list`` generated from the exact form."""
        if self._compiled is None:
            object.__setattr__(self, "_compiled", _compile_components(self.components, self.variables))
        return self._compiled

    def evaluate(self, point: Sequence[float]) -> list:
        if len(point) != self.dimension:
            raise DimensionMismatch(f"point has {len(point)} entries, expected {self.dimension}")
        return self.compiled()(*point)

    def __str__(self):
        parts = []
        for var, c in zip(self.variables, self.components):
            if not c.is_zero():
                parts.append(f"({c})*d/d{var}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        return f"<SymbolicVectorField {label}{self}>"


def _compile_components(components, variables):
    args = [f"_a{i}" for i in range(len(variables))]
    lines = [f"def _field({', '.join(args)}):"]
    outs = []
    for k, c in enumerate(components):
        num = c.num.to_source(args)
        if c.den.is_constant():
            outs.append(f"{num} / {float(c.den.constant_value())!r}")
        else:
            lines.append(f"    _d{k} = {c.den.to_source(args)}")
            lines.append(f"    if abs(_d{k}) <= {POLE_TOLERANCE!r}:")
            lines.append(f"        raise PoleError('component {k} has a pole at ' + repr(({', '.join(args)},)))")
            outs.append(f"{num} / _d{k}")
    lines.append(f"    return [{', '.join(outs)}]")
    namespace = {"PoleError": PoleError}
    exec("\n".join(lines), namespace)  # noqa: S102 - generated from exact coefficients only
    return namespace["_field"]


def lie_bracket(X: SymbolicVectorField, Y: SymbolicVectorField) -> SymbolicVectorField:
    """[X, Y]^j = sum_i X^i d_i Y^j - Y^i d_i X^j."""
    X._check(Y)
    comps = []
    for yj, xj in zip(Y.components, X.components):
        acc = RationalFunction.constant(0, X.variables)
        for var, xi, yi in zip(X.variables, X.components, Y.components):
            if not xi.is_zero():
                dy = yj.partial(var)
                if not dy.is_zero():
                    acc = acc + xi * dy
            if not yi.is_zero():
                dx = xj.partial(var)
                if not dx.is_zero():
                    acc = acc - yi * dx
        comps.append(acc)
    return SymbolicVectorField(X.variables, comps)


# ---------------------------------------------------------------------------
# spans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Coefficients:
    values: tuple

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class NotInSpan:
    component: int
    monomial: tuple
    variables: tuple

    def describe(self) -> str:
        mono = "*".join(
            v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, self.monomial) if e
        ) or "1"
        return f"monomial {mono} in the d/d{self.variables[self.component]} component (over the common denominator)"


def _span_system(fields: Sequence[SymbolicVectorField]):
    """Numerators of every field over the product of all distinct denominators.

    Returns (rows, columns) where rows lists (component, monomial) keys and
    columns[f] maps each key to field f's coefficient.
    """
    variables = fields[0].variables
    dens: list[Polynomial] = []
    for f in fields:
        for c in f.components:
            if not c.den.is_constant() and c.den not in dens:
                dens.append(c.den)
    one = Polynomial.constant(1, variables)

    def cofactor(den: Polynomial) -> Polynomial:
        out = one
        for d in dens:
            if d != den:
                out = out * d
        return out

    cof_cache: dict = {}
    columns = []
    keys: dict[tuple, None] = {}
    for f in fields:
        col = {}
        for j, c in enumerate(f.components):
            if c.is_zero():
                continue
            den_key = c.den if not c.den.is_constant() else None
            if den_key not in cof_cache:
                cof_cache[den_key] = cofactor(c.den) if den_key is not None else _product(dens, one)
            scale = 1 / c.den.constant_value() if c.den.is_constant() else Fraction(1)
            p = c.num * cof_cache[den_key]
            for mono, coeff in p.terms.items():
                col[(j, mono)] = coeff * scale
                keys[(j, mono)] = None
        columns.append(col)
    return list(keys), columns


def _product(polys, one):
    out = one
    for p in polys:
        out = out * p
    return out


def _decompose(Z: SymbolicVectorField, basis: Sequence[SymbolicVectorField]):
    for B in basis:
        Z._check(B)
    if not basis:
        if Z.is_zero():
            return Coefficients(())
        j = next(i for i, c in enumerate(Z.components) if not c.is_zero())
        mono = max(Z.components[j].num.terms)
        return NotInSpan(j, mono, Z.variables)
    rows, columns = _span_system(list(basis) + [Z])
    if not rows:
        return Coefficients(tuple(Fraction(0) for _ in basis))
    A = [[col.get(key, Fraction(0)) for col in columns[:-1]] for key in rows]
    b = [columns[-1].get(key, Fraction(0)) for key in rows]
    result = solve_linear_exact(A, b)
    if isinstance(result, NoSolution):
        j, mono = rows[result.witness_row]
        return NotInSpan(j, mono, Z.variables)
    if isinstance(result, UniqueSolution):
        return Coefficients(result.solution)
    raise LinearDependence("basis fields are linearly dependent")


class FieldSpace:
    """Finite-dimensional real vector space of fields with a fixed basis."""

    def __init__(self, basis: Sequence[SymbolicVectorField], names: Sequence[str] | None = None,
                 validate: bool = True):
        basis = list(basis)
        if not basis:
            raise ValueError("a FieldSpace needs at least one basis field")
        for B in basis[1:]:
            basis[0]._check(B)
        if names is not None:
            if len(names) != len(basis):
                raise ValueError("one name per basis field is required")
            basis = [B.renamed(n) for B, n in zip(basis, names)]
        self.basis = tuple(basis)
        if validate:
            self._validate_independent()

    def _validate_independent(self):
        rows, columns = _span_system(self.basis)
        A = [[col.get(key, Fraction(0)) for col in columns] for key in rows]
        if not A:
            raise LinearDependence("basis contains only zero fields")
        result = solve_linear_exact(A, [0] * len(A))
        if not isinstance(result, UniqueSolution):
            raise LinearDependence(
                "basis fields are linearly dependent over the constants"
            )

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def variables(self) -> tuple:
        return self.basis[0].variables

    def __len__(self):
        return len(self.basis)

    def __getitem__(self, i) -> SymbolicVectorField:
        return self.basis[i]

    def __iter__(self):
        return iter(self.basis)

    def names(self) -> list:
        return [B.name or f"e{i + 1}" for i, B in enumerate(self.basis)]

    def combination(self, coeffs: Sequence) -> SymbolicVectorField:
        if len(coeffs) != len(self.basis):
            raise DimensionMismatch("coefficient count differs from the space dimension")
        out = SymbolicVectorField.zero(self.variables)
        for c, B in zip(coeffs, self.basis):
            c = as_fraction(c)
            if c:
                out = out + B.scale(c)
        return out

    def subspace(self, indices: Sequence[int]) -> "FieldSpace":
        return FieldSpace([self.basis[i] for i in indices], validate=False)


def decompose_in_span(Z: SymbolicVectorField, S: FieldSpace):
    """Exact constant coefficients of Z in S's basis, or a NotInSpan witness."""
    return _decompose(Z, S.basis)


# ---------------------------------------------------------------------------
# scheme checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BracketWitness:
    left: int
    right: int
    bracket: SymbolicVectorField
    reason: NotInSpan

    def describe(self, left_names=None, right_names=None) -> str:
        ln = left_names[self.left] if left_names else f"#{self.left}"
        rn = right_names[self.right] if right_names else f"#{self.right}"
        return f"[{ln}, {rn}] = {self.bracket} is not in the span ({self.reason.describe()})"


@dataclass(frozen=True)
class SchemeReport:
    w_in_v: bool
    w_in_v_witness: int | None
    w_closed: bool
    w_closed_witness: BracketWitness | None
    normalizes: bool
    normalizes_witness: BracketWitness | None
    structure_constants: tuple | None
    w_names: tuple = ()
    v_names: tuple = ()

    @property
    def passed(self) -> bool:
        return self.w_in_v and self.w_closed and self.normalizes

    def to_dict(self) -> dict:
        def sc():
            if self.structure_constants is None:
                return None
            return [[[str(c) for c in row] for row in plane] for plane in self.structure_constants]

        return {
            "w_in_v": self.w_in_v,
            "w_in_v_witness": self.w_in_v_witness,
            "w_closed": self.w_closed,
            "w_closed_witness": None if self.w_closed_witness is None
            else self.w_closed_witness.describe(self.w_names, self.w_names),
            "normalizes": self.normalizes,
            "normalizes_witness": None if self.normalizes_witness is None
            else self.normalizes_witness.describe(self.w_names, self.v_names),
            "structure_constants": sc(),
            "passed": self.passed,
        }


def structure_constants_from(space: FieldSpace):
    """c[a][b][g] with [e_a, e_b] = sum_g c[a][b][g] e_g, or the first failing pair."""
    r = space.dimension
    zero = tuple(Fraction(0) for _ in range(r))
    table = [[zero] * r for _ in range(r)]
    for a, b in combinations(range(r), 2):
        br = lie_bracket(space[a], space[b])
        dec = decompose_in_span(br, space)
        if isinstance(dec, NotInSpan):
            return None, BracketWitness(a, b, br, dec)
        table[a][b] = dec.values
        table[b][a] = tuple(-c for c in dec.values)
    return tuple(tuple(row) for row in table), None


def check_scheme(W: FieldSpace, V: FieldSpace) -> SchemeReport:
    """Check W subset V, [W, W] subset W and [W, V] subset V exactly."""
    W[0]._check(V[0])
    w_in_v, w_in_v_witness = True, None
    for i, Y in enumerate(W):
        if isinstance(decompose_in_span(Y, V), NotInSpan):
            w_in_v, w_in_v_witness = False, i
            break
    constants, closed_witness = structure_constants_from(W)
    normalizes, norm_witness = True, None
    for i, Y in enumerate(W):
        for j, X in enumerate(V):
            br = lie_bracket(Y, X)
            dec = decompose_in_span(br, V)
            if isinstance(dec, NotInSpan):
                normalizes, norm_witness = False, BracketWitness(i, j, br, dec)
                break
        if not normalizes:
            break
    return SchemeReport(
        w_in_v=w_in_v,
        w_in_v_witness=w_in_v_witness,
        w_closed=closed_witness is None,
        w_closed_witness=closed_witness,
        normalizes=normalizes,
        normalizes_witness=norm_witness,
        structure_constants=constants,
        w_names=tuple(W.names()),
        v_names=tuple(V.names()),
    )


@dataclass(frozen=True)
class LieAlgebraResult:
    is_lie: bool
    structure_constants: tuple | None
    witness: tuple | None  # (i, j) of the first non-closing pair
    witness_bracket: SymbolicVectorField | None = None

    def __bool__(self):
        return self.is_lie


def is_lie_algebra(V: FieldSpace) -> LieAlgebraResult:
    constants, witness = structure_constants_from(V)
    if witness is None:
        return LieAlgebraResult(True, constants, None)
    return LieAlgebraResult(False, None, (witness.left, witness.right), witness.bracket)
