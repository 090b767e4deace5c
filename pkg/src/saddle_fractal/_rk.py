"""Dormand-Prince 5(4) integration with section events, compiled through ``_accel.jit``.

Two right-hand sides share one stepper:

* ``MODE_XY``: the saddle normal form in ``(x, y)``;
* ``MODE_V``: the relative deviation ``v`` of ``u = u0 (1 + v)`` where
  ``u = x^p y^q``, i.e. ``v' = sum_i b_i (1 + v)^i`` with ``b_i = a_i u0^(i-1)``.
  Integrating ``v`` instead of ``u`` keeps full relative precision of the
  tiny nonlinear correction.

Crossings are localized by bisection on the step fraction, re-stepping from
the accepted step start each time.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, jit

MODE_XY = 0
MODE_V = 1

# section codes
SEC_X = 0          # x - level
SEC_Y = 1          # y - level
SEC_DIAG = 2       # y - x
SEC_TIME = 3       # t - level (fixed end time)
SEC_V_DIAG = 4     # (p + q) t - level - log1p(v): diagonal in the v picture

OK = 0
NO_CROSSING = 1
STIFF = 2
MAX_STEPS = 3

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _rhs(mode, prm, coef, a, b):
    if mode == MODE_XY:
        p = prm[0]
        q = prm[1]
        r = prm[2]
        u = a**p * b**q
        acc = 0.0
        for i in range(coef.shape[0] - 1, -1, -1):
            acc = acc * u + coef[i]
        return a, -r * b + acc * u * b / q
    w = 1.0 + a
    acc = 0.0
    for i in range(coef.shape[0] - 1, -1, -1):
        acc = acc * w + coef[i]
    return acc * w * w, 0.0


_rhs_c = jit(_rhs)


def _section(code, prm, level, t, a, b):
    if code == SEC_X:
        return a - level
    if code == SEC_Y:
        return b - level
    if code == SEC_DIAG:
        return b - a
    if code == SEC_TIME:
        return t - level
    return (prm[0] + prm[1]) * t - level - math.log1p(a)


_section_c = jit(_section)


def _step(mode, prm, coef, a, b, h, k1a, k1b):
    k2a, k2b = _rhs_c(mode, prm, coef, a + h * A21 * k1a, b + h * A21 * k1b)
    k3a, k3b = _rhs_c(mode, prm, coef, a + h * (A31 * k1a + A32 * k2a), b + h * (A31 * k1b + A32 * k2b))
    k4a, k4b = _rhs_c(mode, prm, coef, a + h * (A41 * k1a + A42 * k2a + A43 * k3a),
                      b + h * (A41 * k1b + A42 * k2b + A43 * k3b))
    k5a, k5b = _rhs_c(mode, prm, coef, a + h * (A51 * k1a + A52 * k2a + A53 * k3a + A54 * k4a),
                      b + h * (A51 * k1b + A52 * k2b + A53 * k3b + A54 * k4b))
    k6a, k6b = _rhs_c(mode, prm, coef,
                      a + h * (A61 * k1a + A62 * k2a + A63 * k3a + A64 * k4a + A65 * k5a),
                      b + h * (A61 * k1b + A62 * k2b + A63 * k3b + A64 * k4b + A65 * k5b))
    na = a + h * (B1 * k1a + B3 * k3a + B4 * k4a + B5 * k5a + B6 * k6a)
    nb = b + h * (B1 * k1b + B3 * k3b + B4 * k4b + B5 * k5b + B6 * k6b)
    k7a, k7b = _rhs_c(mode, prm, coef, na, nb)
    ea = h * (E1 * k1a + E3 * k3a + E4 * k4a + E5 * k5a + E6 * k6a + E7 * k7a)
    eb = h * (E1 * k1b + E3 * k3b + E4 * k4b + E5 * k5b + E6 * k6b + E7 * k7b)
    return na, nb, ea, eb, k7a, k7b


_step_c = jit(_step)


def _integrate(mode, prm, coef, a0, b0, code, level, rtol, atol, t_max, h0,
               event_tol, max_bisect, max_steps):
    """Integrate until the section function changes sign; returns (status, t, a, b, steps)."""
    t = 0.0
    a = a0
    b = b0
    h = h0
    g0 = _section_c(code, prm, level, t, a, b)
    if g0 == 0.0:
        return OK, t, a, b, 0
    k1a, k1b = _rhs_c(mode, prm, coef, a, b)
    steps = 0
    while steps < max_steps:
        if t >= t_max:
            return NO_CROSSING, t, a, b, steps
        if h > t_max - t:
            h = t_max - t
        na, nb, ea, eb, k7a, k7b = _step_c(mode, prm, coef, a, b, h, k1a, k1b)
        sa = atol + rtol * max(abs(a), abs(na))
        sb = atol + rtol * max(abs(b), abs(nb))
        err = max(abs(ea) / sa, abs(eb) / sb)
        if not (err <= 1.0):
            fac = 0.9 * err ** -0.2 if err == err and err < 1e300 else 0.1
            h = h * max(0.1, fac)
            if h < 1e-14 * max(1.0, abs(t)):
                return STIFF, t, a, b, steps
            continue
        steps += 1
        g1 = _section_c(code, prm, level, t + h, na, nb)
        if (g0 < 0.0) != (g1 < 0.0) or g1 == 0.0:
            lo = 0.0
            hi = 1.0
            ba, bb, bt = na, nb, t + h
            for _ in range(max_bisect):
                if abs(g1) <= event_tol:
                    break
                mid = 0.5 * (lo + hi)
                ma, mb, _ea, _eb, _ka, _kb = _step_c(mode, prm, coef, a, b, mid * h, k1a, k1b)
                gm = _section_c(code, prm, level, t + mid * h, ma, mb)
                ba, bb, bt, g1 = ma, mb, t + mid * h, gm
                if (g0 < 0.0) != (gm < 0.0) or gm == 0.0:
                    hi = mid
                else:
                    lo = mid
            return OK, bt, ba, bb, steps
        t = t + h
        a = na
        b = nb
        k1a = k7a
        k1b = k7b
        g0 = g1
        fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
        h = h * max(0.2, fac)
    return MAX_STEPS, t, a, b, steps


_integrate_c = jit(_integrate)


def integrate(mode, prm, coef, a0, b0, code, level, rtol=1e-10, atol=1e-14, t_max=200.0,
              h0=1e-3, event_tol=1e-12, max_bisect=100, max_steps=2_000_000):
    fn = _integrate_c if USE_NUMBA else _integrate
    return fn(int(mode), np.asarray(prm, dtype=float), np.asarray(coef, dtype=float),
              float(a0), float(b0), int(code), float(level), float(rtol), float(atol),
              float(t_max), float(h0), float(event_tol), int(max_bisect), int(max_steps))
