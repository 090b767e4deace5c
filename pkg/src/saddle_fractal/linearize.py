"""Orbital linearization of the resonant saddle normal form.

The resonant flow ``u' = sum_{i=2}^{N} a_i u^i`` has the series solution
``u(t, u0) = u0 + sum_i g_i(t) u0^i`` with polynomial ``g_i`` of degree at
most ``i - 1``.  Those polynomials build a map ``F`` that sends level curves
of the linear saddle onto phase curves of the nonlinear one:

    F(x, y) = (x, y * (1 + sum_i g_i(log|y|^(-1/r)) x^(p(i-1)) y^(q(i-1)))^(1/q)),

extended by ``F(x, 0) = (x, 0)`` and ``F(0, y) = (0, y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from ._errors import DomainError
from .saddlefield import NormalFormField, Section, integrate_to_section

Poly = Polynomial


def _trim(poly: Polynomial) -> Polynomial:
    coef = np.trim_zeros(np.asarray(poly.coef, dtype=float), "b")
    return Polynomial(coef if coef.size else [0.0])


@dataclass(frozen=True, eq=False)
class SeriesFlow:
    """Coefficients ``a_2 .. a_N`` and the polynomials ``g_2 .. g_N`` (index ``i - 2``)."""

    coeffs: tuple
    g: tuple

    @property
    def N(self) -> int:
        return len(self.coeffs) + 1

    def g_i(self, i: int) -> Polynomial:
        return self.g[i - 2]

    def check(self) -> None:
        for i, gi in enumerate(self.g, start=2):
            if gi.degree() > i - 1:
                raise AssertionError(f"deg g_{i} = {gi.degree()} exceeds {i - 1}")
            if gi(0.0) != 0.0:
                raise AssertionError(f"g_{i}(0) = {gi(0.0)} is not zero")


def compute_g_polynomials(coeffs: Sequence[float]) -> SeriesFlow:
    """Match powers of ``u0`` in ``d/dt u = sum a_j u^j`` and integrate with ``g_i(0) = 0``.

    ``coeffs`` is ``(a_2, ..., a_N)``; the flow is truncated at order N.
    """
    a = [float(v) for v in coeffs]
    if len(a) < 1:
        raise DomainError("need at least a_2 (N >= 2)")
    N = len(a) + 1
    zero = Polynomial([0.0])
    # series[k] = coefficient of u0^k in u, k = 0..N
    series = [zero, Polynomial([1.0])] + [zero] * (N - 1)
    g = []
    for i in range(2, N + 1):
        # coefficient of u0^i in sum_j a_j u^j; only g_1 .. g_{i-1} contribute
        rhs = zero
        power = list(series[: i + 1])  # u^1 truncated at order i
        for j in range(2, N + 1):
            nxt = [zero] * (i + 1)
            for k1 in range(1, i + 1):
                if not power[k1].coef.any():
                    continue
                for k2 in range(1, i + 1 - k1):
                    nxt[k1 + k2] = nxt[k1 + k2] + power[k1] * series[k2]
            power = nxt
            if a[j - 2] != 0.0:
                rhs = rhs + a[j - 2] * power[i]
        gi = _trim(rhs.integ(lbnd=0.0))
        if gi.degree() > i - 1:
            raise AssertionError(f"deg g_{i} = {gi.degree()} exceeds {i - 1}")
        series[i] = gi
        g.append(gi)
    flow = SeriesFlow(tuple(a), tuple(g))
    flow.check()
    return flow


def u_series(flow: SeriesFlow, t, u0):
    """Truncated series ``u0 + sum g_i(t) u0^i``."""
    t = np.asarray(t, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    out = u0.copy() if u0.ndim else float(u0)
    for i, gi in enumerate(flow.g, start=2):
        out = out + gi(t) * u0**i
    return out if np.ndim(out) else float(out)


def _bracket(p: int, q: int, flow: SeriesFlow, x: float, y: float) -> float:
    r = p / q
    tau = -math.log(abs(y)) / r
    return 1.0 + sum(float(gi(tau)) * x ** (p * (i - 1)) * y ** (q * (i - 1))
                     for i, gi in enumerate(flow.g, start=2))


def F_map(p: int, q: int, flow: SeriesFlow, x: float, y: float) -> tuple[float, float]:
    """Quadrant-wise linearizing map; fixes both axes pointwise."""
    if not (abs(x) <= 1 and abs(y) <= 1):
        raise DomainError("F is defined on [-1, 1]^2")
    if x == 0.0 or y == 0.0:
        return float(x), float(y)
    B = _bracket(p, q, flow, x, y)
    if not B > 0:
        raise DomainError(f"bracket {B:g} is not positive at ({x}, {y})")
    return float(x), float(y * B ** (1.0 / q))


def G_function(p: int, q: int, a2: float, y: float) -> float:
    """Limit of ``d/dx F_2`` on the axis ``x = 0``: nonzero only when ``p = 1``."""
    if p > 1 or y == 0.0:
        return 0.0
    # g_2(t) = a2 t
    return (1.0 / q) * y ** (q + 1) * a2 * (-q * math.log(abs(y)))


def jacobian_F(p: int, q: int, flow: SeriesFlow, x: float, y: float) -> np.ndarray:
    """Analytic Jacobian off the axes; the explicit axis matrices on them."""
    if y == 0.0:
        return np.eye(2)
    if x == 0.0:
        a2 = flow.coeffs[0] if flow.coeffs else 0.0
        return np.array([[1.0, 0.0], [G_function(p, q, a2, y), 1.0]])
    r = p / q
    tau = -math.log(abs(y)) / r
    B, Bx, By = 1.0, 0.0, 0.0
    for i, gi in enumerate(flow.g, start=2):
        k = i - 1
        gv = float(gi(tau))
        dg = float(gi.deriv()(tau))
        xp = x ** (p * k)
        yq = y ** (q * k)
        B += gv * xp * yq
        Bx += gv * p * k * x ** (p * k - 1) * yq
        By += dg * (-1.0 / (r * y)) * xp * yq + gv * xp * q * k * y ** (q * k - 1)
    if not B > 0:
        raise DomainError(f"bracket {B:g} is not positive at ({x}, {y})")
    root = B ** (1.0 / q)
    dF2dx = y * root / (q * B) * Bx
    dF2dy = root + y * root / (q * B) * By
    return np.array([[1.0, 0.0], [dF2dx, dF2dy]])


def verify_curve_mapping(fld: NormalFormField, flow: SeriesFlow, s: float,
                         sample_count: int = 64) -> float:
    """Max ``|F_2(x, y_lin(x)) - y_field(x)|`` along the phase curve through ``(s, delta)``.

    ``y_lin = (s / x)^r`` is the linear level curve and ``y_field`` the
    integrated normal-form trajectory; x is sampled log-uniformly on
    ``[s, delta]``.  The difference is the truncation error of the series,
    which shrinks like ``s^(p N)``.
    """
    d = fld.delta
    if d != 1.0:
        raise DomainError("the curve check uses the unit-box convention (delta = 1)")
    if not 0 < s < d:
        raise DomainError(f"need 0 < s < delta, got {s}")
    if sample_count < 2:
        raise DomainError("sample_count must be at least 2")
    n_flow = len(flow.coeffs)
    given = fld.coeffs[:n_flow] + (0.0,) * max(0, n_flow - len(fld.coeffs))
    if not np.allclose(given, flow.coeffs, rtol=0, atol=0) or any(fld.coeffs[n_flow:]):
        raise DomainError("field coefficients are not those of the series flow")
    xs = np.geomspace(s, d, sample_count)
    worst = 0.0
    for x in xs:
        y_lin = (s / x) ** fld.r
        _, y_map = F_map(fld.p, fld.q, flow, float(x), float(y_lin))
        if x == s:
            y_true = d
        else:
            y_true = integrate_to_section(fld, (s, d), Section.vertical(float(x))).point[1]
        worst = max(worst, abs(y_map - y_true))
    return worst
