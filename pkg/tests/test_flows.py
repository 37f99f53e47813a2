import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasilie.bases import affine_basis
from quasilie.errors import DimensionMismatch, DomainError
from quasilie.flows import (
    AffineFlow2D,
    ScalingFlow2D,
    apply_flow,
    compose_flows,
    flow_of,
    identity_flow,
    inverse_field,
    invert,
    push_forward_affine_closed_form,
    push_forward_numeric,
    right_log_derivative,
)
from quasilie.timedep.functions import as_time_function
from quasilie.timedep.tdfield import NumericField, TimeDependentField


def mp_field(a="1/5", b="-1", c="exp(2*t/5)"):
    V = affine_basis(-3)
    return TimeDependentField(V, [as_time_function(s) for s in (b, c, "1", a, "0")])


def test_affine_forward_and_inverse():
    h = AffineFlow2D("exp(t)", "0", "1")
    assert h.forward(1.0, [1.0, math.e]) == pytest.approx([1.0, 1.0])
    assert h.inverse(1.0, [1.0, 1.0]) == pytest.approx([1.0, math.e])
    assert h.display_map(1.0, [1.0, 1.0]) == pytest.approx([1.0, math.e])


def test_scaling_inverse():
    g = ScalingFlow2D("1 + t")
    assert apply_flow(g, 1.0, [2.0, 3.0], "inverse") == pytest.approx([2.0, 6.0])


def test_group_membership():
    assert AffineFlow2D("exp(t)", "t", "1 + t").in_group
    assert not AffineFlow2D("4", "0", "1").in_group


def test_non_positive_parameters_rejected():
    h = AffineFlow2D("1 - t", "0", "1")
    with pytest.raises(DomainError):
        h.forward(2.0, [1.0, 1.0])


def test_identity_flow():
    e = identity_flow(2)
    assert e.forward(3.0, [1.0, 2.0]) == [1.0, 2.0]
    assert e.is_normalized([[1.0, 2.0]])


def test_affine_composition_matches_pointwise():
    g = AffineFlow2D("exp(t)", "sin(t)", "1 + t^2")
    h = AffineFlow2D("1 + t", "t", "exp(-t)")
    gh = compose_flows(g, h)
    assert isinstance(gh, AffineFlow2D)
    for t in (0.3, 1.1):
        x = [0.7, -0.4]
        assert gh.forward(t, x) == pytest.approx(g.forward(t, h.forward(t, x)), rel=1e-13)
        assert invert(gh).forward(t, gh.forward(t, x)) == pytest.approx(x, rel=1e-12)


def test_closed_form_matches_numeric_pushforward():
    X = mp_field()
    h = AffineFlow2D("exp(t/5)", "t/3", "1 + t^2/4")
    closed = push_forward_affine_closed_form(h, X)
    numeric = push_forward_numeric(h, X)
    for t in (0.0, 0.5, 1.7):
        for y in ([0.8, 0.3], [1.4, -1.0]):
            assert closed(t, y) == pytest.approx(numeric(t, y), abs=1e-10)


def test_closed_form_needs_affine_basis():
    from quasilie.bases import ml_basis
    X = TimeDependentField(ml_basis(1), [as_time_function(s) for s in ("1", "1", "0")])
    with pytest.raises(DimensionMismatch):
        push_forward_affine_closed_form(AffineFlow2D("1", "0", "1"), X)


def test_liouville_control_removes_damping():
    X = mp_field()
    g = AffineFlow2D("exp(t/5)", "0", "1")
    Y = push_forward_affine_closed_form(g, X)
    t = 1.3
    b2, c2, d2, a2, e2 = (f(t) for f in Y.coefficients)
    assert a2 == pytest.approx(0, abs=1e-14)
    assert e2 == 0
    assert d2 == pytest.approx(math.exp(t / 5))
    assert c2 == pytest.approx(math.exp(t / 5))  # k alpha with k = 1


def test_inverse_field_of_time_independent_field():
    X = NumericField(lambda t, x: [x[1], 0.0], 2)
    Xinv = inverse_field(X)
    assert Xinv(0.7, [1.0, 2.0]) == pytest.approx([-2.0, 0.0], abs=1e-8)


def test_right_log_derivative_recovers_field():
    X = mp_field()
    g = flow_of(X)
    for t in (0.5, 1.2):
        y = g.forward(t, [1.0, 0.3])
        assert right_log_derivative(g, t, y) == pytest.approx(X(t, y), abs=1e-6)


def test_flow_of_jacobian_from_variational_equation():
    X = mp_field()
    g = flow_of(X)
    J = g.jacobian(0.8, [1.0, 0.3])
    from quasilie.flows import fd_jacobian
    assert np.allclose(J, fd_jacobian(g.forward, 0.8, [1.0, 0.3]), atol=1e-6)


# ---- properties -----------------------------------------------------------

params = st.tuples(st.floats(0.2, 2), st.floats(-1, 1), st.floats(0.2, 2))


@settings(max_examples=30)
@given(params, params, st.floats(0.5, 2), st.floats(-2, 2))
def test_affine_inverse_composes_to_identity(p, q, x, v):
    g = AffineFlow2D(*(as_time_function(repr(c) + "*(1 + t/7)") for c in p))
    t = 0.6
    assert compose_flows(g, invert(g)).forward(t, [x, v]) == pytest.approx([x, v], rel=1e-12, abs=1e-12)
