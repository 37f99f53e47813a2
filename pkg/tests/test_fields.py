import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasilie.bases import affine_basis, affine_w, basis_exponent, ml_basis, riccati_basis
from quasilie.errors import DimensionMismatch, LinearDependence
from quasilie.fields import (
    Coefficients,
    FieldSpace,
    NotInSpan,
    SymbolicVectorField,
    check_scheme,
    decompose_in_span,
    is_lie_algebra,
    lie_bracket,
)

from .strategies import polynomial_fields, small_fractions

XV = ("x", "v")
F = SymbolicVectorField.from_expressions


def coeffs(Z, S):
    d = decompose_in_span(Z, S)
    assert isinstance(d, Coefficients), d
    return tuple(d)


def test_bracket_of_coordinate_fields():
    X = F(["v", "0"], XV)
    Y = F(["0", "x"], XV)
    assert lie_bracket(X, Y) == F(["-x", "v"], XV)


def test_bracket_x2_x3_for_n_2():
    V = affine_basis(2)
    assert lie_bracket(V[1], V[2]) == F(["x^2", "-2*x*v"], XV)


def test_decompose_y2_x3():
    V, W = affine_basis(2), affine_w(2)
    assert coeffs(lie_bracket(W[1], V[2]), V) == (0, 0, 0, -1, 1)


def test_not_in_span_witness():
    V = affine_basis(2)
    d = decompose_in_span(lie_bracket(V[1], V[2]), V)
    assert isinstance(d, NotInSpan)
    assert "x" in d.describe()


def test_dependent_basis_rejected():
    with pytest.raises(LinearDependence):
        FieldSpace([F(["x", "0"], XV), F(["2*x", "0"], XV)])


def test_mixed_coordinates_rejected():
    with pytest.raises(DimensionMismatch):
        lie_bracket(F(["x", "0"], XV), F(["x", "0"], ("x", "y")))


@pytest.mark.parametrize("n", [2, -3, 5])
def test_affine_scheme_passes(n):
    rep = check_scheme(affine_w(n), affine_basis(n))
    assert rep.passed
    d = rep.to_dict()
    assert d["w_in_v"] and d["w_closed"] and d["normalizes"]


def test_scheme_failure_names_witness():
    V = affine_basis(2)
    W = FieldSpace([V[2]], names=["X3"])
    rep = check_scheme(W, FieldSpace([V[2], V[0]], names=["X3", "X1"]))
    assert not rep.passed and not rep.normalizes
    assert rep.to_dict()["normalizes_witness"]


def test_affine_v_not_lie():
    res = is_lie_algebra(affine_basis(2))
    assert not res.is_lie
    assert res.witness == (1, 2)


def test_riccati_sl2_constants():
    R = riccati_basis()
    res = is_lie_algebra(R)
    assert res.is_lie
    c = res.structure_constants
    # [Y0, Y1] = Y0, [Y0, Y2] = 2 Y1, [Y1, Y2] = Y2
    assert tuple(c[0][1]) == (1, 0, 0)
    assert tuple(c[0][2]) == (0, 2, 0)
    assert tuple(c[1][2]) == (0, 0, 1)


def test_ml_brackets():
    V = ml_basis(1)
    assert coeffs(lie_bracket(V[2], V[0]), V) == (1, 0, 0)
    assert coeffs(lie_bracket(V[2], V[1]), V) == (0, -1, 0)
    assert check_scheme(FieldSpace([V[2]]), V).passed


def test_basis_exponent():
    assert basis_exponent(affine_basis(-3)) == -3
    assert basis_exponent(riccati_basis()) is None
    with pytest.raises(ValueError):
        affine_basis(1)


def test_evaluate_matches_exact():
    X = F(["x*v^2/(1 + x^2)", "x - v"], XV)
    assert X.evaluate([2.0, 3.0]) == pytest.approx([2 * 9 / 5, -1.0])


# ---- properties -----------------------------------------------------------


@given(polynomial_fields(), polynomial_fields())
def test_antisymmetry(X, Y):
    assert lie_bracket(X, Y) == -lie_bracket(Y, X)


@settings(max_examples=50)
@given(polynomial_fields(), polynomial_fields(), polynomial_fields())
def test_jacobi(X, Y, Z):
    total = (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
             + lie_bracket(Z, lie_bracket(X, Y)))
    assert total.is_zero()


@given(st.lists(small_fractions, min_size=5, max_size=5), st.sampled_from([2, -3, 4]))
def test_decompose_recovers_coefficients(cs, n):
    V = affine_basis(n)
    assert coeffs(V.combination(cs), V) == tuple(cs)


@settings(max_examples=50)
@given(polynomial_fields(), polynomial_fields(), polynomial_fields(), small_fractions, small_fractions)
def test_bracket_bilinear(X, Y, Z, a, b):
    assert lie_bracket(X.scale(a) + Y.scale(b), Z) == lie_bracket(X, Z).scale(a) + lie_bracket(Y, Z).scale(b)
