"""Orbits of one-dimensional return maps and their exact epsilon-neighborhoods.

A return map ``g`` with ``0 < g(s) < s`` pushes every point toward the origin,
so the orbit ``s0, g(s0), g(g(s0)), ...`` is a strictly decreasing sequence
accumulating at 0.  The Lebesgue measure of the union of the intervals
``[s_n - eps, s_n + eps]`` is what the 1-D box-dimension estimator regresses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._errors import DomainError

DEFAULT_FLOOR = 1e-9
DEFAULT_BURN_IN = 10


class Variant(str, enum.Enum):
    PARABOLIC = "parabolic"
    PARABOLIC_LOG = "parabolic-log"
    LINEAR_HYPERBOLIC = "linear"
    POWER_HYPERBOLIC = "power"


_KIND = {
    Variant.PARABOLIC: _kernels.PARABOLIC,
    Variant.PARABOLIC_LOG: _kernels.PARABOLIC_LOG,
    Variant.LINEAR_HYPERBOLIC: _kernels.LINEAR_HYPERBOLIC,
    Variant.POWER_HYPERBOLIC: _kernels.POWER_HYPERBOLIC,
}


@dataclass(frozen=True)
class MapModel:
    """Return-map model ``g`` on the validity interval ``(0, s_max]``.

    parabolic:      g(s) = s - C s^alpha
    parabolic-log:  g(s) = s - C s^alpha (-log s)
    linear:         g(s) = kappa s
    power:          g(s) = C s^beta

    Construction samples the interval and rejects parameters for which ``g``
    is not strictly increasing with ``0 < g(s) < s``.
    """

    variant: Variant
    alpha: float = 2.0
    C: float = 1.0
    kappa: float = 0.5
    beta: float = 2.0
    s_max: float | None = None

    def __post_init__(self):
        variant = Variant(self.variant)
        object.__setattr__(self, "variant", variant)
        if self.s_max is None:
            object.__setattr__(self, "s_max", 1.0 if variant is Variant.LINEAR_HYPERBOLIC else 0.5)
        s_max = float(self.s_max)
        if not (s_max > 0 and math.isfinite(s_max)):
            raise DomainError(f"s_max must be positive, got {s_max}")
        if variant in (Variant.PARABOLIC, Variant.PARABOLIC_LOG):
            if not self.alpha > 1:
                raise DomainError(f"alpha must exceed 1, got {self.alpha}")
            if not self.C > 0:
                raise DomainError(f"C must be positive, got {self.C}")
        if variant is Variant.PARABOLIC_LOG and s_max >= 1:
            raise DomainError("parabolic-log needs s_max < 1 so that -log s > 0")
        if variant is Variant.LINEAR_HYPERBOLIC and not 0 < self.kappa < 1:
            raise DomainError(f"kappa must lie in (0, 1), got {self.kappa}")
        if variant is Variant.POWER_HYPERBOLIC:
            if not self.beta > 1:
                raise DomainError(f"beta must exceed 1, got {self.beta}")
            if not self.C > 0:
                raise DomainError(f"C must be positive, got {self.C}")
        self._check_by_sampling()

    @property
    def kind(self) -> int:
        return _KIND[self.variant]

    def _raw(self, s):
        return _kernels.evaluate_numpy(self.kind, self.alpha, self.C, self.kappa, self.beta, s)

    def decrement(self, s):
        """``s - g(s)`` computed from its closed form, without cancellation."""
        s = np.asarray(s, dtype=float)
        v = self.variant
        if v is Variant.PARABOLIC:
            return self.C * s**self.alpha
        if v is Variant.PARABOLIC_LOG:
            return self.C * s**self.alpha * (-np.log(s))
        if v is Variant.LINEAR_HYPERBOLIC:
            return (1.0 - self.kappa) * s
        return s - self.C * s**self.beta

    def _check_by_sampling(self, n: int = 400):
        s = np.geomspace(self.s_max * 1e-8, self.s_max, n)
        g = self._raw(s)
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise DomainError("model leaves (0, s) on its validity interval")
        if np.any(self.decrement(s) <= 0):
            raise DomainError("model has g(s) >= s on its validity interval")
        if np.any(np.diff(g) <= 0):
            raise DomainError("model is not strictly increasing on its validity interval")


def evaluate_map(model: MapModel, s):
    """``g(s)``; scalar in, float out, arrays are evaluated elementwise."""
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr > 0)) or np.any(arr > model.s_max):
        raise DomainError(f"s must lie in (0, {model.s_max}]")
    out = model._raw(arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class Orbit1D:
    """Strictly decreasing positive sequence, stored largest first.

    ``floor`` is the cutoff that stopped generation; the 1-D estimator only
    trusts epsilon values of at least ``10 * floor``.
    """

    points: np.ndarray
    source: MapModel | None = None
    floor: float = DEFAULT_FLOOR
    burn_in: int = DEFAULT_BURN_IN
    _ascending: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise DomainError("orbit needs at least one point")
        if np.any(~(pts > 0)) or not np.all(np.isfinite(pts)):
            raise DomainError("orbit points must be finite and positive")
        if np.any(np.diff(pts) >= 0):
            raise DomainError("orbit points must be strictly decreasing")
        if not self.floor > 0:
            raise DomainError("floor must be positive")
        pts.setflags(write=False)
        asc = np.ascontiguousarray(pts[::-1])
        asc.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_ascending", asc)
        if self.source is not None:
            check_gap_monotonicity(pts, self.burn_in)

    def __len__(self):
        return self.points.size

    @property
    def gaps(self) -> np.ndarray:
        return self.points[:-1] - self.points[1:]


def check_gap_monotonicity(points: np.ndarray, burn_in: int = DEFAULT_BURN_IN) -> None:
    """Raise unless the gaps are nonincreasing after the first ``burn_in`` points.

    A slack of a few ulps of each point absorbs rounding in the subtraction.
    """
    pts = np.asarray(points, dtype=float)[burn_in:]
    if pts.size < 3:
        return
    gaps = pts[:-1] - pts[1:]
    slack = 8 * np.finfo(float).eps * pts[:-2]
    if np.any(gaps[1:] > gaps[:-1] + slack):
        k = int(np.argmax(gaps[1:] > gaps[:-1] + slack)) + burn_in
        raise DomainError(f"gaps increase after burn-in (first at index {k})")


def generate_orbit(model: MapModel, s0: float, max_points: int = 100_000,
                   floor: float = DEFAULT_FLOOR) -> Orbit1D:
    """Iterate ``model`` from ``s0`` until ``max_points`` or the first value below ``floor``."""
    if not 0 < s0 <= model.s_max:
        raise DomainError(f"s0 must lie in (0, {model.s_max}], got {s0}")
    if max_points < 1:
        raise DomainError("max_points must be at least 1")
    if not floor > 0:
        raise DomainError("floor must be positive")
    pts = _kernels.iterate_kernel(model.kind, model.alpha, model.C, model.kappa,
                                  model.beta, s0, max_points, floor)
    return Orbit1D(pts, source=model, floor=floor)


def eps_neighborhood_length(orbit: Orbit1D, epsilon: float) -> float:
    """Exact length of the union of ``[s_n - eps, s_n + eps]``."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    return _kernels.union_length_kernel(orbit._ascending, float(epsilon))


@dataclass(frozen=True)
class TailNucleusSplit:
    """Tail = disjoint intervals before ``critical_index``; nucleus = the merged rest."""

    epsilon: float
    critical_index: int
    tail_length: float
    nucleus_length: float

    @property
    def total(self) -> float:
        return self.tail_length + self.nucleus_length


def tail_nucleus_split(orbit: Orbit1D, epsilon: float) -> TailNucleusSplit:
    """Split the neighborhood at the first (0-based) index whose gap is at most ``2 eps``."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if len(orbit) < 2:
        raise DomainError("tail/nucleus split needs at least two points")
    w = 2.0 * epsilon
    hits = np.flatnonzero(orbit.gaps <= w)
    n_c = int(hits[0]) if hits.size else len(orbit)
    tail = w * n_c
    if n_c < len(orbit):
        rest = orbit._ascending[: len(orbit) - n_c]
        nucleus = _kernels.union_length_kernel(rest, float(epsilon))
    else:
        nucleus = 0.0
    return TailNucleusSplit(float(epsilon), n_c, tail, nucleus)


def theoretical_orbit_dim(model: MapModel) -> float:
    """``1 - 1/alpha`` for parabolic variants, 0 for hyperbolic ones."""
    if model.variant in (Variant.PARABOLIC, Variant.PARABOLIC_LOG):
        return 1.0 - 1.0 / model.alpha
    return 0.0


def power_transform(orbit: Orbit1D, exponent: float) -> Orbit1D:
    """Pointwise ``s -> s**exponent``; the result carries no source model."""
    if not exponent > 0:
        raise DomainError("exponent must be positive")
    if exponent == 1:
        return Orbit1D(orbit.points, source=None, floor=orbit.floor, burn_in=orbit.burn_in)
    return Orbit1D(orbit.points**exponent, source=None, floor=orbit.floor**exponent,
                   burn_in=orbit.burn_in)
