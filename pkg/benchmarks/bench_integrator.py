"""Time the pure-Python and compiled DP5 kernels on the same problems.

    python3 benchmarks/bench_integrator.py [--repeat N]

Both kernels run the identical step sequence, so the script also checks that
their trajectories agree bit for bit.
"""
import argparse
import math
import time

import numpy as np

from quasilie.catalog import get_model
from quasilie.dynamics import IntegratorConfig, integrate_ivp
from quasilie.dynamics import _backend


def lorenz(t, y):
    x, u, z = y
    return [10.0 * (u - x), x * (28.0 - z) - u, x * u - 8.0 / 3.0 * z]


def oscillator(t, y):
    return [y[1], -y[0] - 0.1 * y[1] + math.sin(t)]


def problems():
    mp = get_model("milne-pinney-demo")
    return [
        ("forced oscillator, [0, 200]", oscillator, 0.0, 200.0, [1.0, 0.0]),
        ("Lorenz, [0, 20]", lorenz, 0.0, 20.0, [1.0, 1.0, 1.0]),
        ("Milne-Pinney catalog field, [0, 2]", mp.system, 0.0, 2.0, mp.initial_states[0]),
    ]


def best_of(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rtol", type=float, default=1e-10)
    args = ap.parse_args()
    if _backend.compiled_kernel is None:
        raise SystemExit("compiled kernel not built; reinstall with Cython and a C compiler available")
    cfg = IntegratorConfig(rel_tol=args.rtol, abs_tol=args.rtol * 1e-2, max_steps=10**6)
    print(f"{'problem':38s} {'steps':>7s} {'python [s]':>11s} {'compiled [s]':>13s} {'speedup':>8s}  identical")
    for name, f, t0, t1, y0 in problems():
        tp, py = best_of(lambda: integrate_ivp(f, t0, t1, y0, cfg, kernel=_backend.python_kernel), args.repeat)
        tc, cc = best_of(lambda: integrate_ivp(f, t0, t1, y0, cfg, kernel=_backend.compiled_kernel), args.repeat)
        same = np.array_equal(py.times, cc.times) and np.array_equal(py.states, cc.states)
        print(f"{name:38s} {len(py.times) - 1:7d} {tp:11.4f} {tc:13.4f} {tp / tc:7.2f}x  {same}")


if __name__ == "__main__":
    main()
