import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasilie.dynamics import BACKEND, IntegratorConfig, Trajectory, antiderivative, integrate_ivp
from quasilie.dynamics import _backend
from quasilie.errors import DomainError, MaxStepsExceeded, StepUnderflow, WindowError
from quasilie.timedep.functions import as_time_function


def oscillator(t, y):
    return [y[1], -y[0]]


def test_exponential_oracle():
    traj = integrate_ivp(lambda t, y: [y[0]], 0.0, 1.0, [1.0])
    assert traj.t1 == 1.0
    assert traj.state_at_node(-1)[0] == pytest.approx(math.e, rel=1e-10)


def test_dense_output_between_nodes():
    traj = integrate_ivp(oscillator, 0.0, 10.0, [1.0, 0.0])
    for t in np.linspace(0, 10, 37):
        x, v = traj.dense(float(t))
        assert x == pytest.approx(math.cos(t), abs=1e-8)
        assert v == pytest.approx(-math.sin(t), abs=1e-8)


def test_dense_is_exact_at_nodes():
    traj = integrate_ivp(oscillator, 0.0, 3.0, [1.0, 0.0])
    for i, t in enumerate(traj.times):
        assert traj.dense(float(t)) == traj.state_at_node(i)


def test_dense_outside_range():
    traj = integrate_ivp(oscillator, 0.0, 1.0, [1.0, 0.0])
    with pytest.raises(DomainError):
        traj.dense(1.5)


def test_backward_integration_returns():
    fwd = integrate_ivp(oscillator, 0.0, 2.0, [1.0, 0.0])
    back = integrate_ivp(oscillator, 2.0, 0.0, fwd.state_at_node(-1))
    assert back.t0 == 0.0 and back.t1 == 2.0
    assert back.state_at_node(0) == pytest.approx([1.0, 0.0], abs=1e-9)
    assert back.dense(1.0)[0] == pytest.approx(math.cos(1.0), abs=1e-9)


def test_pole_raises_step_underflow_with_component():
    # x' = x^2, x(0) = 1 blows up at t = 1
    with pytest.raises(StepUnderflow) as info:
        integrate_ivp(lambda t, y: [y[0] ** 2], 0.0, 2.0, [1.0], variables=("x",))
    assert info.value.component == "x"
    assert info.value.t == pytest.approx(1.0, abs=1e-3)


def test_max_steps():
    with pytest.raises(MaxStepsExceeded):
        integrate_ivp(oscillator, 0.0, 100.0, [1.0, 0.0], IntegratorConfig(max_steps=10))


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=-1)
    assert IntegratorConfig().scaled(0.01).rel_tol == pytest.approx(1e-12)


def test_tolerance_controls_error():
    errs = []
    for rtol in (1e-6, 1e-9):
        traj = integrate_ivp(oscillator, 0.0, 10.0, [1.0, 0.0], IntegratorConfig(rtol, rtol * 1e-2))
        errs.append(abs(traj.state_at_node(-1)[0] - math.cos(10.0)))
    assert errs[1] < errs[0] / 10


@pytest.mark.skipif(_backend.compiled_kernel is None, reason="extension not built")
def test_backends_are_bit_identical():
    def f(t, y):
        return [y[1], -y[0] + 0.3 * math.sin(t) * y[0] ** 2]

    a = integrate_ivp(f, 0.0, 20.0, [0.5, 0.1], kernel=_backend.python_kernel)
    b = integrate_ivp(f, 0.0, 20.0, [0.5, 0.1], kernel=_backend.compiled_kernel)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.states, b.states)
    assert a.nfev == b.nfev


def test_backend_name():
    assert BACKEND in ("compiled", "python")


def test_csv_round_trip(tmp_path):
    traj = integrate_ivp(oscillator, 0.0, 5.0, [1.0, 0.25])
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    back = Trajectory.from_csv(path, field=oscillator)
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.states, traj.states)
    # Hermite dense output from the field derivatives
    assert back.dense(2.5)[0] == pytest.approx(traj.dense(2.5)[0], abs=1e-6)


def test_antiderivative_quadrature():
    F = antiderivative(as_time_function("exp(-t)"), 0, 0, window=(-1, 3))
    assert F(2.0) == pytest.approx(1 - math.exp(-2), abs=1e-12)
    assert F(-0.5) == pytest.approx(1 - math.exp(0.5), abs=1e-12)
    assert F.derivative()(1.0) == pytest.approx(math.exp(-1))
    with pytest.raises(DomainError):
        F(5.0)


def test_antiderivative_needs_window():
    with pytest.raises(WindowError):
        antiderivative(as_time_function("exp(-t)"), 0, 0)(1.0)


def test_antiderivative_of_constant_is_exact():
    F = antiderivative(as_time_function("1/5"), 0, 0)
    assert F.eval_exact(3) == pytest.approx(0.6)
    assert F(2.0) == 0.4


# ---- properties -----------------------------------------------------------


@settings(max_examples=25)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 5))
def test_linear_system_matches_closed_form(x0, v0, T):
    traj = integrate_ivp(oscillator, 0.0, T, [x0, v0])
    x = x0 * math.cos(T) + v0 * math.sin(T)
    assert traj.state_at_node(-1)[0] == pytest.approx(x, abs=1e-8)


@settings(max_examples=25)
@given(st.floats(-1, 1), st.floats(0.1, 2))
def test_blocks_of_a_prolongation_are_independent(x0, T):
    single = integrate_ivp(oscillator, 0.0, T, [x0, 0.5])
    double = integrate_ivp(lambda t, z: oscillator(t, z[:2]) + oscillator(t, z[2:]), 0.0, T, [x0, 0.5, 1.0, 0.0])
    assert double.state_at_node(-1)[:2] == pytest.approx(single.state_at_node(-1), abs=1e-9)
