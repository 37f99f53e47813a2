"""Adaptive Dormand-Prince 5(4) integration and sampled trajectories."""
from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import (DimensionMismatch, DomainError, MaxStepsExceeded, MissingDerivative,
                      PoleError, StepUnderflow)
from . import _backend

# Continuous extension of order 4 for the Dormand-Prince pair (Shampine 1986),
# y(t_s + th*h) = y_s + h * sum_j K_j * sum_p P[j][p] * th^(p+1).
DENSE_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)
_P = np.array(DENSE_P)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    initial_step: float = 0.0  # 0 selects the step automatically
    max_step: float = math.inf
    max_steps: int = 100_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if not self.max_step > 0 or self.initial_step < 0:
            raise ValueError("max_step must be positive and initial_step non-negative")

    def scaled(self, factor: float) -> "IntegratorConfig":
        return IntegratorConfig(self.rel_tol * factor, self.abs_tol * factor,
                                self.initial_step, self.max_step, self.max_steps)


class Trajectory:
    """Accepted steps of a solution, stored with increasing times.

    ``dense(t)`` uses the integrator's own continuous extension when the stage
    data is available, cubic Hermite interpolation when only derivatives are
    known, and returns the stored state verbatim at a node.
    """

    def __init__(self, times, states, derivatives=None, steps=None, variables=None):
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=float)
        if states.ndim == 1:
            states = states.reshape(-1, 1)
        if len(times) != len(states):
            raise DimensionMismatch(f"{len(times)} times but {len(states)} states")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        self.times = times
        self.states = states
        self.derivatives = None if derivatives is None else np.asarray(derivatives, dtype=float)
        # steps[i] = (t_start, h_signed, y_start, K) for the interval [times[i], times[i+1]]
        self._steps = steps
        self.variables = tuple(variables) if variables else tuple(f"x{i + 1}" for i in range(self.dim))

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t1(self) -> float:
        return float(self.times[-1])

    def __len__(self):
        return len(self.times)

    def state_at_node(self, i):
        return self.states[i].tolist()

    def dense(self, t: float) -> list:
        times = self.times
        if not times[0] <= t <= times[-1]:
            raise DomainError(f"t={t!r} outside trajectory range [{times[0]}, {times[-1]}]")
        i = bisect.bisect_left(times, t)
        if i < len(times) and times[i] == t:
            return self.states[i].tolist()
        i -= 1
        if self._steps is not None:
            t_s, h, y_s, K = self._steps[i]
            th = (t - t_s) / h
            q = _P @ np.array([th, th * th, th ** 3, th ** 4])
            return (y_s + h * (q @ K)).tolist()
        if self.derivatives is None:
            raise MissingDerivative("trajectory has no derivative data for dense output")
        ta, tb = times[i], times[i + 1]
        h = tb - ta
        s = (t - ta) / h
        ya, yb = self.states[i], self.states[i + 1]
        da, db = self.derivatives[i], self.derivatives[i + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return (h00 * ya + h10 * h * da + h01 * yb + h11 * h * db).tolist()

    def sample(self, count: int) -> tuple:
        ts = np.linspace(self.t0, self.t1, count)
        ts[0], ts[-1] = self.t0, self.t1
        return ts, np.array([self.dense(float(t)) for t in ts])

    def at(self, t: float) -> list:
        return self.dense(t)

    # CSV -------------------------------------------------------------------
    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"x{i + 1}" for i in range(self.dim)])
            for t, row in zip(self.times, self.states):
                w.writerow([format(float(t), ".17g")] + [format(float(v), ".17g") for v in row])

    @classmethod
    def from_csv(cls, path, field: Callable | None = None) -> "Trajectory":
        """Read a CSV written by ``to_csv``; ``field`` supplies derivatives for dense output."""
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0][:1] != ["t"]:
            raise ValueError(f"{path}: missing 't,x1,...' header")
        data = [[float(v) for v in r] for r in rows[1:] if r]
        times = [r[0] for r in data]
        states = [r[1:] for r in data]
        derivs = None
        if field is not None:
            derivs = [list(field(t, x)) for t, x in zip(times, states)]
        return cls(times, states, derivatives=derivs)


def _wrap(f: Callable, n: int) -> Callable:
    nan = [math.nan] * n

    def rhs(t, y):
        try:
            out = f(t, y)
        except (PoleError, ZeroDivisionError, OverflowError):
            # treated as a failed stage: the step is rejected and shrunk
            return nan
        if len(out) != n:
            raise DimensionMismatch(f"field returned {len(out)} components for a {n}-dimensional state")
        return [float(v) for v in out]

    return rhs


def integrate_ivp(f: Callable, t0: float, t1: float, x0: Sequence[float],
                  cfg: IntegratorConfig | None = None, kernel=None,
                  variables: Sequence[str] | None = None) -> Trajectory:
    """Solve x' = f(t, x), x(t0) = x0 on the interval between t0 and t1."""
    cfg = cfg or IntegratorConfig()
    x0 = [float(v) for v in x0]
    n = len(x0)
    dim = getattr(f, "dim", n)
    if dim != n:
        raise DimensionMismatch(f"initial state has {n} entries, field has dimension {dim}")
    variables = variables or getattr(f, "variables", None)
    kernel = kernel or _backend.integrate_kernel
    t0, t1 = float(t0), float(t1)
    status, times, states, stages, nfev, info = kernel(
        _wrap(f, n), t0, t1, x0, cfg.rel_tol, cfg.abs_tol, cfg.initial_step, cfg.max_step, cfg.max_steps)
    if status == _backend.STATUS_UNDERFLOW:
        t, h, comp = info
        name = (variables[comp] if variables and comp >= 0 else f"x{comp + 1}") if comp >= 0 else "?"
        raise StepUnderflow(f"step size {h:.3g} underflowed at t={t:.17g}; component {name} "
                            f"is blowing up or hits a pole", t=t, component=name)
    if status == _backend.STATUS_MAXSTEPS:
        raise MaxStepsExceeded(f"more than {cfg.max_steps} steps between t={t0} and t={times[-1]!r}")
    steps = []
    for i, K in enumerate(stages):
        steps.append((times[i], times[i + 1] - times[i], np.array(states[i]), np.array(K)))
    if t1 < t0:
        times = times[::-1]
        states = states[::-1]
        steps = steps[::-1]
    traj = Trajectory(times, states, steps=steps, variables=variables)
    traj.nfev = nfev
    return traj
