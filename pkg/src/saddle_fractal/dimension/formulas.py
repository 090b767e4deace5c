"""Closed-form dimensions and asymptotics indexed by the loop codimension K.

Integer-valued inputs return ``fractions.Fraction`` so identities such as
``spiral_dim_formula(K) == 1 + corollary_dims(K).away`` hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .._errors import CandidateValidationError, DomainError
from ..orbits1d import MapModel, Variant


def _codim(K, lowest: int) -> int:
    if isinstance(K, bool):
        raise DomainError(f"codimension must be an integer, got {K!r}")
    if not isinstance(K, int):
        if isinstance(K, Real) and float(K).is_integer():
            K = int(K)
        else:
            raise DomainError(f"codimension must be an integer, got {K!r}")
    if K < lowest:
        raise DomainError(f"codimension must be at least {lowest}, got {K}")
    return K


@dataclass(frozen=True)
class CorollaryDims:
    away: Fraction
    through: Fraction


def corollary_dims(K: int) -> CorollaryDims:
    """Orbit dimensions of the return map on transversals away from / through the saddle."""
    K = _codim(K, 2)
    if K % 2 == 0:
        return CorollaryDims(1 - Fraction(2, K), 1 - Fraction(1, K - 1))
    return CorollaryDims(1 - Fraction(2, K + 1), 1 - Fraction(1, K))


def spiral_dim_formula(K: int) -> Fraction:
    """Box dimension of a spiral trajectory around a loop of codimension K."""
    K = _codim(K, 1)
    return 2 - Fraction(2, K) if K % 2 == 0 else 2 - Fraction(2, K + 1)


@dataclass(frozen=True)
class AsymptoticModel:
    """``s^exponent`` or ``s^exponent (-log s)`` when ``has_log``."""

    exponent: float
    has_log: bool

    def matches(self, other: "AsymptoticModel", tol: float) -> bool:
        return self.has_log == other.has_log and abs(float(self.exponent) - float(other.exponent)) <= tol


def displacement_asymptotics_formula(K: int, r: float = 1, through_saddle: bool = False) -> AsymptoticModel:
    """Leading term of the return map displacement.

    K = 1 (r > 1) is the hyperbolic case where the map itself behaves like
    ``s^r``; for K >= 2 the ratio must be 1.
    """
    K = _codim(K, 1)
    if K == 1:
        if not r > 1:
            raise DomainError("codimension 1 requires a ratio r > 1")
        return AsymptoticModel(Fraction(r) if isinstance(r, int) else r, False)
    if r != 1:
        raise DomainError("codimension >= 2 requires r = 1")
    m, odd = divmod(K, 2)
    if through_saddle:
        return AsymptoticModel(Fraction(K), True) if odd else AsymptoticModel(Fraction(K - 1), False)
    return AsymptoticModel(Fraction(m + 1), True) if odd else AsymptoticModel(Fraction(m), False)


def induced_away_model(K: int, r: float = 2.0, C: float = 1.0) -> MapModel:
    """Return-map model with the away-transversal asymptotics of codimension K.

    K = 1 gives ``C s^r``, K = 2 a linear contraction, K = 2m (m >= 2) the
    parabolic ``s - C s^m`` and K = 2m + 1 the parabolic-log ``s - C s^(m+1)(-log s)``.
    """
    K = _codim(K, 1)
    if K == 1:
        return MapModel(Variant.POWER_HYPERBOLIC, beta=r, C=C)
    if K == 2:
        return MapModel(Variant.LINEAR_HYPERBOLIC, kappa=0.5)
    m, odd = divmod(K, 2)
    if odd:
        return MapModel(Variant.PARABOLIC_LOG, alpha=m + 1, C=C)
    return MapModel(Variant.PARABOLIC, alpha=m, C=C)


CANDIDATE_TOL = 1e-6


def cyclicity_candidates(d: float) -> frozenset:
    """The two codimensions ``{n - 1, n}`` with ``n = 2 / (2 - d)`` sharing spiral dimension d."""
    if isinstance(d, Fraction):
        n_exact = 2 / (2 - d) if d < 2 else None
    else:
        n_exact = None
    d_f = float(d)
    if not (1 <= d_f < 2) or math.isnan(d_f):
        raise DomainError(f"spiral dimension must lie in [1, 2), got {d}")
    n_val = float(n_exact) if n_exact is not None else 2.0 / (2.0 - d_f)
    n = round(n_val)
    if abs(n_val - n) > CANDIDATE_TOL:
        lo, hi = max(math.floor(n_val), 2), max(math.ceil(n_val), 2)
        nearest = min((2 - 2 / k for k in (lo, hi)), key=lambda v: abs(v - d_f))
        raise CandidateValidationError(
            f"2/(2-d) = {n_val:.8g} is not an integer; nearest admissible d is {nearest:.8g}",
            nearest_d=nearest)
    return frozenset({n - 1, n})
