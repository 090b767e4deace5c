"""Resonant saddle normal form, its transition maps and composed return maps.

The field is

    x' = x,
    y' = -r y + (1/q) sum_{i=1}^{N} a_{i+1} (x^p y^q)^i y,     r = p/q,

so ``u = x^p y^q`` obeys ``u' = sum_{i=2}^{N+1} a_i u^i`` while ``x`` grows
like ``e^t``.  Transition maps are computed by direct integration in
``(x, y)``.  Return maps additionally expose ``log_ratio(s) = log(P(s)/s)``
computed in the relative-deviation picture, which resolves displacements
``s - P(s)`` far below the integrator's relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _rk
from ._errors import DomainError, IntegrationError, StiffnessError
from .dimension.fitting import POWER_LOG, FitConfig, LogLogFit, fit_loglog
from .dimension.formulas import AsymptoticModel

SQRT2 = math.sqrt(2.0)
RTOL = 1e-10
ATOL = 1e-14
EVENT_TOL = 1e-12
MAX_BISECT = 100


@dataclass(frozen=True)
class NormalFormField:
    """Normal form with ratio ``p/q`` and resonant coefficients ``a_2 .. a_{N+1}``."""

    p: int = 1
    q: int = 1
    coeffs: tuple = ()
    delta: float = 1.0

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if math.gcd(int(self.p), int(self.q)) != 1:
            raise DomainError(f"p={self.p} and q={self.q} are not coprime")
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))
        if not all(math.isfinite(a) for a in self.coeffs):
            raise DomainError("coefficients must be finite")
        if not 0 < self.delta <= 1:
            raise DomainError("delta must lie in (0, 1]")

    @property
    def r(self) -> float:
        return self.p / self.q

    @property
    def N(self) -> int:
        return max(len(self.coeffs), 1)

    @property
    def is_linear(self) -> bool:
        return not any(self.coeffs)

    def coeff_array(self) -> np.ndarray:
        return np.array(self.coeffs if self.coeffs else (0.0,), dtype=float)

    def params(self) -> np.ndarray:
        return np.array([self.p, self.q, self.r], dtype=float)


def field_eval(fld: NormalFormField, x: float, y: float) -> tuple[float, float]:
    u = x**fld.p * y**fld.q
    acc = 0.0
    for a in reversed(fld.coeff_array()):
        acc = acc * u + a
    return float(x), float(-fld.r * y + acc * u * y / fld.q)


@dataclass(frozen=True)
class Section:
    """``{x = level}``, ``{y = level}`` or the diagonal ``{y = x}``."""

    kind: str
    level: float = 0.0

    def __post_init__(self):
        if self.kind not in ("x", "y", "diagonal"):
            raise DomainError(f"unknown section kind {self.kind!r}")

    @classmethod
    def vertical(cls, level: float) -> "Section":
        return cls("x", float(level))

    @classmethod
    def horizontal(cls, level: float) -> "Section":
        return cls("y", float(level))

    @classmethod
    def diagonal(cls) -> "Section":
        return cls("diagonal")

    def residual(self, x: float, y: float) -> float:
        if self.kind == "x":
            return x - self.level
        if self.kind == "y":
            return y - self.level
        return y - x

    @property
    def code(self) -> int:
        return {"x": _rk.SEC_X, "y": _rk.SEC_Y, "diagonal": _rk.SEC_DIAG}[self.kind]


@dataclass(frozen=True)
class SectionCrossing:
    point: tuple
    time: float
    section: Section
    steps: int = 0


def _raise_for(status: int, what: str):
    if status == _rk.STIFF:
        raise StiffnessError(f"step size underflow while integrating {what}")
    if status == _rk.NO_CROSSING:
        raise IntegrationError(f"no crossing within the time limit while integrating {what}")
    if status == _rk.MAX_STEPS:
        raise IntegrationError(f"step limit reached while integrating {what}")


def integrate_to_section(fld: NormalFormField, start: Sequence[float], section: Section,
                         rtol: float = RTOL, atol: float = ATOL, t_max: float | None = None,
                         event_tol: float = EVENT_TOL) -> SectionCrossing:
    """Adaptive DOPRI5 from ``start`` until the flow crosses ``section``."""
    x0, y0 = float(start[0]), float(start[1])
    if not (x0 > 0 and y0 > 0):
        raise DomainError("start must lie in the open first quadrant")
    if t_max is None:
        if section.kind == "x":
            # x = x0 e^t, so the crossing time is known in advance
            if section.level <= x0:
                raise IntegrationError("x only grows along the flow; section lies behind the start")
            t_max = math.log(section.level / x0) + 1.0
        else:
            t_max = 200.0
    status, t, x, y, steps = _rk.integrate(
        _rk.MODE_XY, fld.params(), fld.coeff_array(), x0, y0, section.code, section.level,
        rtol, atol, t_max, 1e-3, event_tol, MAX_BISECT, 2_000_000)
    _raise_for(status, f"to {section.kind}-section")
    return SectionCrossing((x, y), t, section, steps)


def _check_s(s: float, upper: float, name: str):
    if not 0 < s < upper:
        raise DomainError(f"{name} needs 0 < s < {upper:g}, got {s}")


def dulac_map(fld: NormalFormField, s: float) -> float:
    """From ``(s, delta)`` on ``{y = delta}`` to ``{x = delta}``; returns the exit height."""
    _check_s(s, fld.delta, "dulac_map")
    return integrate_to_section(fld, (s, fld.delta), Section.vertical(fld.delta)).point[1]


def transition_D2(fld: NormalFormField, s: float) -> float:
    """From the diagonal point at distance ``s`` from the origin to ``{x = delta}``."""
    _check_s(s, SQRT2 * fld.delta, "transition_D2")
    return integrate_to_section(fld, (s / SQRT2, s / SQRT2), Section.vertical(fld.delta)).point[1]


def transition_D1(fld: NormalFormField, s: float) -> float:
    """From ``(s, delta)`` to the diagonal; returns the diagonal distance parameter."""
    _check_s(s, fld.delta, "transition_D1")
    return SQRT2 * integrate_to_section(fld, (s, fld.delta), Section.diagonal()).point[0]


@dataclass(frozen=True)
class RegularTransitionModel:
    """``R(s) = a1 s + sum c s^l`` over ``terms = ((c, l), ...)`` with ``l >= 2``."""

    a1: float = 1.0
    terms: tuple = ()

    def __post_init__(self):
        if not self.a1 > 0:
            raise DomainError("a1 must be positive")
        terms = tuple((float(c), float(ell)) for c, ell in self.terms)
        if any(ell < 2 for _, ell in terms):
            raise DomainError("higher-order exponents must be at least 2")
        object.__setattr__(self, "terms", terms)

    def __call__(self, s: float) -> float:
        return self.a1 * s + sum(c * s**ell for c, ell in self.terms)

    def log1p_ratio(self, s: float) -> float:
        """``log(R(s) / (a1 s))`` without cancellation."""
        return math.log1p(sum((c / self.a1) * s ** (ell - 1) for c, ell in self.terms))


def _b_coeffs(fld: NormalFormField, u0: float) -> np.ndarray:
    a = fld.coeff_array()
    return a * u0 ** np.arange(1, a.size + 1)


def _v_at_time(fld: NormalFormField, u0: float, T: float) -> float:
    """Relative deviation ``u(T)/u0 - 1`` for the resonant flow started at ``u0``."""
    if fld.is_linear or T == 0:
        return 0.0
    status, t, v, _, _ = _rk.integrate(
        _rk.MODE_V, fld.params(), _b_coeffs(fld, u0), 0.0, 0.0, _rk.SEC_TIME, T,
        RTOL, ATOL, 2 * T + 1.0, 1e-3, EVENT_TOL * max(1.0, T), MAX_BISECT, 2_000_000)
    _raise_for(status, "relative deviation")
    return v


def _v_to_diagonal(fld: NormalFormField, z: float) -> tuple[float, float]:
    """Time and relative deviation when the orbit of ``(z, delta)`` meets the diagonal."""
    p, q, d = fld.p, fld.q, fld.delta
    level = q * math.log(d / z)
    if fld.is_linear:
        return level / (p + q), 0.0
    u0 = z**p * d**q
    status, t, v, _, _ = _rk.integrate(
        _rk.MODE_V, fld.params(), _b_coeffs(fld, u0), 0.0, 0.0, _rk.SEC_V_DIAG, level,
        RTOL, ATOL, 2 * level + 10.0, 1e-3, EVENT_TOL, MAX_BISECT, 2_000_000)
    _raise_for(status, "to the diagonal")
    return t, v


class _ReturnMap:
    """Shared helpers: ``P(s) = s exp(L)`` and ``s - P(s) = -s expm1(L)``."""

    def log_ratio(self, s: float) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def image(self, s: float) -> float:
        return s * math.exp(self.log_ratio(s))

    def displacement(self, s: float) -> float:
        return -s * math.expm1(self.log_ratio(s))


@dataclass(frozen=True)
class OffSaddleMap(_ReturnMap):
    """``P1 = R o D`` on the transversal ``{y = delta}``."""

    fld: NormalFormField
    R: RegularTransitionModel

    def __call__(self, s: float) -> float:
        return self.R(dulac_map(self.fld, s))

    def log_ratio(self, s: float) -> float:
        f = self.fld
        _check_s(s, f.delta, "off-saddle map")
        v = _v_at_time(f, s**f.p * f.delta**f.q, math.log(f.delta / s))
        D = f.delta * (s / f.delta) ** f.r * (1.0 + v) ** (1.0 / f.q)
        return ((f.r - 1.0) * (math.log(s) - math.log(f.delta)) + math.log(self.R.a1)
                + math.log1p(v) / f.q + self.R.log1p_ratio(D))


@dataclass(frozen=True)
class ThroughSaddleMap(_ReturnMap):
    """``P = D1 o R o D2`` on the diagonal, parametrized by distance to the origin."""

    fld: NormalFormField
    R: RegularTransitionModel

    def __call__(self, s: float) -> float:
        f = self.fld
        z = self.R(transition_D2(f, s))
        return transition_D1(f, z)

    def log_ratio(self, s: float) -> float:
        f = self.fld
        p, q, d = f.p, f.q, f.delta
        _check_s(s, SQRT2 * d, "through-saddle map")
        h = s / SQRT2
        v2 = _v_at_time(f, h ** (p + q), math.log(d / h))
        y2 = (h ** (p + q) * (1.0 + v2) / d**p) ** (1.0 / q)
        z = self.R(y2)
        if not 0 < z < d:
            raise DomainError(f"regular transition leaves (0, delta) at s={s}")
        _, v1 = _v_to_diagonal(f, z)
        return ((f.r - 1.0) * (math.log(s) - math.log(SQRT2) - math.log(d))
                + p / (p + q) * math.log(self.R.a1)
                + ((p / q) * math.log1p(v2) + p * self.R.log1p_ratio(y2) + math.log1p(v1)) / (p + q))


def poincare_off_saddle(fld: NormalFormField, R: RegularTransitionModel, s: float) -> float:
    """``R(dulac_map(s))``."""
    return OffSaddleMap(fld, R)(s)


def poincare_through_saddle(fld: NormalFormField, R: RegularTransitionModel, s: float) -> float:
    """``transition_D1(R(transition_D2(s)))``."""
    return ThroughSaddleMap(fld, R)(s)


@dataclass(frozen=True)
class DisplacementFit(AsymptoticModel):
    """Fitted asymptotics plus the underlying regression.

    ``quantity`` is "displacement" when ``s - P(s)`` was fitted and "image"
    when the map contracts so strongly that ``P(s)`` itself carries the exponent.
    """

    quantity: str = "displacement"
    log_exponent: float = 0.0
    residual: float = 0.0
    fit: LogLogFit | None = field(default=None, repr=False, compare=False)
    s_values: tuple = field(default=(), repr=False, compare=False)
    values: tuple = field(default=(), repr=False, compare=False)

    def asymptotic(self) -> AsymptoticModel:
        return AsymptoticModel(self.exponent, self.has_log)


def default_s_grid(n: int = 40, lo: float = 1e-6, hi: float = 1e-2) -> np.ndarray:
    return np.geomspace(lo, hi, n)


IMAGE_RATIO = 0.5


def fit_displacement(pmap: Callable[[float], float], s_grid=None, config: FitConfig | None = None,
                     quantity: str = "auto") -> DisplacementFit:
    """Fit ``s - P(s)`` (or ``P(s)`` for contracting maps) against ``s^a`` and ``s^a (-log s)``.

    With ``quantity="auto"``, ``P(s)`` is fitted when ``P(s) / s`` stays below
    one half on the whole grid; there ``s - P(s) ~ s`` carries no information.
    """
    s = np.asarray(default_s_grid() if s_grid is None else s_grid, dtype=float)
    if s.size < 5 or np.any(~(s > 0)) or np.any(s >= 1):
        raise DomainError("s grid needs at least 5 values in (0, 1)")
    if math.log10(s.max() / s.min()) < 4 - 1e-9:
        raise DomainError("s grid must span at least 4 decades")
    if hasattr(pmap, "log_ratio"):
        lr = np.array([pmap.log_ratio(float(v)) for v in s])
        image = s * np.exp(lr)
        disp = -s * np.expm1(lr)
    else:
        image = np.array([pmap(float(v)) for v in s])
        disp = s - image
    if quantity == "auto":
        quantity = "image" if np.all(image / s < IMAGE_RATIO) else "displacement"
    if quantity == "image":
        values = image
    elif quantity == "displacement":
        values = disp
    else:
        raise DomainError(f"unknown quantity {quantity!r}")
    if np.any(~(values > 0)):
        k = int(np.argmax(~(values > 0)))
        raise DomainError(f"{quantity} is not positive at s={s[k]:g}")
    fit = fit_loglog(s, values, config)
    return DisplacementFit(exponent=fit.slope, has_log=fit.selected == POWER_LOG, quantity=quantity,
                           log_exponent=fit.log_exponent, residual=fit.residual, fit=fit,
                           s_values=tuple(s), values=tuple(values))


def codimension_scenario(K: int, r: int = 2) -> tuple[NormalFormField, RegularTransitionModel]:
    """A field and regular transition whose loop has codimension K.

    K = 1: linear field with integer ratio ``r > 1`` and ``R = id``.
    K = 2: linear ratio-1 field with ``R(s) = s / 2``.
    K = 2m (m >= 2): linear ratio-1 field with ``R(s) = s - s^m``.
    K = 2m + 1: ratio-1 field with ``a_{m+1} = -1`` and ``R = id``.
    """
    if isinstance(K, bool) or not isinstance(K, int) or K < 1:
        raise DomainError("K must be a positive integer")
    if K == 1:
        if not (isinstance(r, int) and r > 1):
            raise DomainError("codimension 1 needs an integer ratio r > 1")
        return NormalFormField(p=r, q=1), RegularTransitionModel()
    m, odd = divmod(K, 2)
    if K == 2:
        return NormalFormField(), RegularTransitionModel(a1=0.5)
    if not odd:
        return NormalFormField(), RegularTransitionModel(1.0, ((-1.0, m),))
    coeffs = [0.0] * m
    coeffs[m - 1] = -1.0
    return NormalFormField(coeffs=tuple(coeffs)), RegularTransitionModel()
