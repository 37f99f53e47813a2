# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) stepping loop.

Twin of ``_dopri_py.integrate_kernel``; keep the arithmetic in the same order
(the extension is built with -ffp-contract=off so no FMA sneaks in).
"""
from libc.math cimport sqrt, pow, fabs, isfinite
from libc.stdlib cimport malloc, free

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784, A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double SAFETY = 0.9
cdef double ALPHA = 0.17
cdef double BETA = 0.04
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 10.0
cdef double EPS = 2.220446049250313e-16

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2


cdef inline double dmax(double a, double b):
    # Python's max keeps the first argument on ties
    return b if b > a else a


cdef inline double dmin(double a, double b):
    return b if b < a else a


cdef list to_list(double* v, Py_ssize_t n):
    cdef Py_ssize_t i
    return [v[i] for i in range(n)]


cdef int call(object f, double t, double* y, double* out, Py_ssize_t n) except -1:
    cdef Py_ssize_t i
    res = f(t, to_list(y, n))
    if len(res) != n:
        raise ValueError(f"field returned {len(res)} components, expected {n}")
    for i in range(n):
        out[i] = <double>res[i]
    return 0


cdef bint all_finite(double* v, Py_ssize_t n):
    cdef Py_ssize_t i
    for i in range(n):
        if not isfinite(v[i]):
            return False
    return True


cdef double rms(double* v, double* sc, Py_ssize_t n):
    cdef double s = 0.0, q
    cdef Py_ssize_t i
    for i in range(n):
        q = v[i] / sc[i]
        s += q * q
    return sqrt(s / n)


def integrate_kernel(f, double t0, double t1, y0, double rtol, double atol,
                     double h0, double hmax, long max_steps):
    cdef Py_ssize_t n = len(y0), i
    cdef double direction = 1.0 if t1 >= t0 else -1.0
    cdef double span = fabs(t1 - t0)
    cdef double t, h, hs, tn, err, errold, fac, remaining, ei, sc, q, q2, worst_val
    cdef double d0, d1, d2, dm, hh, h1
    cdef bint last, ok, rejected
    cdef long nsteps = 0, nfev
    cdef Py_ssize_t worst
    cdef Py_ssize_t blame = -1  # component that dominated the latest error estimate
    cdef double* buf = <double*> malloc(sizeof(double) * n * 17)
    if buf == NULL:
        raise MemoryError()
    cdef double* y = buf
    cdef double* yn = buf + n
    cdef double* ytmp = buf + 2 * n
    cdef double* k1 = buf + 3 * n
    cdef double* k2 = buf + 4 * n
    cdef double* k3 = buf + 5 * n
    cdef double* k4 = buf + 6 * n
    cdef double* k5 = buf + 7 * n
    cdef double* k6 = buf + 8 * n
    cdef double* k7 = buf + 9 * n
    cdef double* scv = buf + 10 * n
    cdef double* dv = buf + 11 * n
    try:
        if span > 0:
            hmax = dmin(hmax, span)
        t = t0
        for i in range(n):
            y[i] = <double>y0[i]
        call(f, t, y, k1, n)
        nfev = 1
        times = [t]
        states = [to_list(y, n)]
        stages = []
        if span == 0:
            return STATUS_OK, times, states, stages, nfev, None
        if h0 > 0:
            h = dmin(h0, hmax)
        else:
            # Hairer's starting step heuristic, same as _dopri_py.initial_step
            for i in range(n):
                scv[i] = atol + rtol * fabs(y[i])
            d0 = rms(y, scv, n)
            d1 = rms(k1, scv, n)
            if d0 < 1e-5 or d1 < 1e-5:
                hh = 1e-6
            else:
                hh = 0.01 * d0 / d1
            hh = dmin(hh, hmax)
            for i in range(n):
                ytmp[i] = y[i] + direction * hh * k1[i]
            call(f, t + direction * hh, ytmp, k2, n)
            nfev += 1
            if not all_finite(k2, n):
                h = dmin(hh * 1e-3, hmax)
            else:
                for i in range(n):
                    dv[i] = k2[i] - k1[i]
                d2 = rms(dv, scv, n) / hh
                dm = dmax(d1, d2)
                if dm <= 1e-15:
                    h1 = dmax(1e-6, hh * 1e-3)
                else:
                    h1 = pow(0.01 / dm, 0.2)
                h = dmin(dmin(100 * hh, h1), hmax)
        errold = 1e-4
        rejected = False
        while True:
            if nsteps >= max_steps:
                return STATUS_MAXSTEPS, times, states, stages, nfev, (t, h, -1)
            remaining = fabs(t1 - t)
            last = False
            if h >= remaining:
                h = remaining
                last = True
            if h < 10.0 * EPS * dmax(fabs(t), 1.0):
                return STATUS_UNDERFLOW, times, states, stages, nfev, (t, h, blame)
            hs = direction * h
            for i in range(n):
                ytmp[i] = y[i] + hs * (A21 * k1[i])
            call(f, t + C2 * hs, ytmp, k2, n)
            for i in range(n):
                ytmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i])
            call(f, t + C3 * hs, ytmp, k3, n)
            for i in range(n):
                ytmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            call(f, t + C4 * hs, ytmp, k4, n)
            for i in range(n):
                ytmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            call(f, t + C5 * hs, ytmp, k5, n)
            for i in range(n):
                ytmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
            tn = t1 if last else t + hs
            call(f, t + hs, ytmp, k6, n)
            for i in range(n):
                yn[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i])
            call(f, tn, yn, k7, n)
            nfev += 6
            err = 0.0
            worst = 0
            worst_val = -1.0
            ok = all_finite(yn, n) and all_finite(k7, n)
            if ok:
                for i in range(n):
                    ei = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
                    sc = atol + rtol * dmax(fabs(y[i]), fabs(yn[i]))
                    q = ei / sc
                    q2 = q * q
                    if q2 > worst_val:
                        worst_val = q2
                        worst = i
                    err += q2
                err = sqrt(err / n)
                ok = isfinite(err)
            else:
                for i in range(n):
                    if not (isfinite(yn[i]) and isfinite(k7[i])):
                        worst = i
                        break
            blame = worst
            if ok and err <= 1.0:
                t = tn
                stages.append([to_list(k1, n), to_list(k2, n), to_list(k3, n), to_list(k4, n),
                               to_list(k5, n), to_list(k6, n), to_list(k7, n)])
                for i in range(n):
                    y[i] = yn[i]
                    k1[i] = k7[i]
                times.append(t)
                states.append(to_list(y, n))
                nsteps += 1
                if last:
                    return STATUS_OK, times, states, stages, nfev, None
                if err == 0.0:
                    fac = FAC_MAX
                else:
                    fac = SAFETY * pow(err, -ALPHA) * pow(errold, BETA)
                    fac = dmin(FAC_MAX, dmax(FAC_MIN, fac))
                if rejected:
                    fac = dmin(1.0, fac)
                errold = dmax(err, 1e-4)
                h = dmin(h * fac, hmax)
                rejected = False
            else:
                if ok:
                    fac = dmax(FAC_MIN, SAFETY * pow(err, -0.2))
                else:
                    fac = FAC_MIN
                h = h * fac
                rejected = True
                nsteps += 1
                if h < 10.0 * EPS * dmax(fabs(t), 1.0):
                    return STATUS_UNDERFLOW, times, states, stages, nfev, (t, h, worst)
    finally:
        free(buf)
