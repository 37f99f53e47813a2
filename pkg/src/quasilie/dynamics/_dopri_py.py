"""Pure-Python Dormand-Prince 5(4) stepping loop.

Mirrors ``_dopri_ext.pyx`` operation for operation so both backends give the
same trajectories up to the last bit on IEEE doubles.
"""
import math

# Butcher tableau (Dormand & Prince 1980)
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order minus embedded fourth-order weights
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

SAFETY = 0.9
ALPHA = 0.17  # 1/5 - 0.75 * BETA
BETA = 0.04
FAC_MIN = 0.2
FAC_MAX = 10.0
EPS = 2.220446049250313e-16

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2


def _finite(v):
    for x in v:
        if not math.isfinite(x):
            return False
    return True


def _norm(v, sc):
    s = 0.0
    for a, b in zip(v, sc):
        q = a / b
        s += q * q
    return math.sqrt(s / len(v))


def initial_step(f, t0, y0, f0, direction, rtol, atol, hmax):
    sc = [atol + rtol * abs(y) for y in y0]
    d0 = _norm(y0, sc)
    d1 = _norm(f0, sc)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, hmax)
    y1 = [y + direction * h0 * k for y, k in zip(y0, f0)]
    f1 = list(f(t0 + direction * h0, y1))
    if not _finite(f1):
        return min(h0 * 1e-3, hmax)
    d2 = _norm([a - b for a, b in zip(f1, f0)], sc) / h0
    dm = max(d1, d2)
    if dm <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / dm) ** 0.2
    return min(100 * h0, h1, hmax)


def integrate_kernel(f, t0, t1, y0, rtol, atol, h0, hmax, max_steps):
    """Integrate y' = f(t, y) from t0 to t1.

    Returns (status, times, states, stages, nfev, info) where ``stages`` holds
    the seven stage derivatives of every accepted step and ``info`` is
    (t, h, component) at failure.
    """
    n = len(y0)
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    hmax = min(hmax, span) if span > 0 else hmax
    t = t0
    y = [float(v) for v in y0]
    k1 = list(f(t, y))
    nfev = 1
    times = [t]
    states = [list(y)]
    stages = []
    if span == 0:
        return STATUS_OK, times, states, stages, nfev, None
    if h0 > 0:
        h = min(h0, hmax)
    else:
        h = initial_step(f, t, y, k1, direction, rtol, atol, hmax)
        nfev += 1
    errold = 1e-4
    rejected = False
    nsteps = 0
    blame = -1  # component that dominated the latest error estimate
    while True:
        if nsteps >= max_steps:
            return STATUS_MAXSTEPS, times, states, stages, nfev, (t, h, -1)
        remaining = abs(t1 - t)
        last = False
        if h >= remaining:
            h = remaining
            last = True
        if h < 10.0 * EPS * max(abs(t), 1.0):
            return STATUS_UNDERFLOW, times, states, stages, nfev, (t, h, blame)
        hs = direction * h
        y2 = [y[i] + hs * (A21 * k1[i]) for i in range(n)]
        k2 = list(f(t + C2 * hs, y2))
        y3 = [y[i] + hs * (A31 * k1[i] + A32 * k2[i]) for i in range(n)]
        k3 = list(f(t + C3 * hs, y3))
        y4 = [y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in range(n)]
        k4 = list(f(t + C4 * hs, y4))
        y5 = [y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]) for i in range(n)]
        k5 = list(f(t + C5 * hs, y5))
        y6 = [y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
              for i in range(n)]
        tn = t1 if last else t + hs
        k6 = list(f(t + hs, y6))
        yn = [y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i])
              for i in range(n)]
        k7 = list(f(tn, yn))
        nfev += 6
        err = 0.0
        worst = 0
        worst_val = -1.0
        ok = _finite(yn) and _finite(k7)
        if ok:
            for i in range(n):
                ei = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
                sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
                q = ei / sc
                q2 = q * q
                if q2 > worst_val:
                    worst_val = q2
                    worst = i
                err += q2
            err = math.sqrt(err / n)
            ok = math.isfinite(err)
        else:
            for i in range(n):
                if not (math.isfinite(yn[i]) and math.isfinite(k7[i])):
                    worst = i
                    break
        blame = worst
        if ok and err <= 1.0:
            t = tn
            stages.append([k1, k2, k3, k4, k5, k6, k7])
            y = yn
            k1 = k7
            times.append(t)
            states.append(list(y))
            nsteps += 1
            if last:
                return STATUS_OK, times, states, stages, nfev, None
            if err == 0.0:
                fac = FAC_MAX
            else:
                fac = SAFETY * err ** (-ALPHA) * errold ** BETA
                fac = min(FAC_MAX, max(FAC_MIN, fac))
            if rejected:
                fac = min(1.0, fac)
            errold = max(err, 1e-4)
            h = min(h * fac, hmax)
            rejected = False
        else:
            if ok:
                fac = max(FAC_MIN, SAFETY * err ** (-0.2))
            else:
                fac = FAC_MIN
            h = h * fac
            rejected = True
            nsteps += 1
            if h < 10.0 * EPS * max(abs(t), 1.0):
                return STATUS_UNDERFLOW, times, states, stages, nfev, (t, h, worst)
