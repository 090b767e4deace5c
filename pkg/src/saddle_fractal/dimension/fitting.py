"""Log-log regression with an optional ``(-log eps)`` correction.

Two models are fitted by ordinary least squares on ``y = log m``:

    Power:     y = a log eps + c
    PowerLog:  y = a log eps + lam log(-log eps) + c

PowerLog is selected only when it shrinks the RMS residual by more than
``FitConfig.threshold``.  A Power residual below ``residual_floor`` always
keeps the Power model: exact power input has both residuals at rounding
level, and smooth power corrections such as ``s^3 (1 + c s^2)`` leave
residuals around 1e-6, while a genuine ``(-log eps)`` factor over a few
decades leaves several 1e-2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .._errors import DomainError, FitError

POWER = "Power"
POWER_LOG = "PowerLog"


@dataclass(frozen=True)
class FitConfig:
    threshold: float = 1.25
    residual_floor: float = 1e-4
    drop_largest: int = 2

    def __post_init__(self):
        if not self.threshold >= 1:
            raise DomainError("threshold must be at least 1")
        if self.drop_largest < 0:
            raise DomainError("drop_largest must be nonnegative")


@dataclass(frozen=True)
class EpsGrid:
    """Strictly decreasing scales in (0, 1)."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in np.asarray(self.values, dtype=float).ravel())
        if len(vals) == 0:
            raise DomainError("grid is empty")
        arr = np.array(vals)
        if np.any(~(arr > 0)) or np.any(arr >= 1):
            raise DomainError("grid values must lie in (0, 1)")
        if np.any(np.diff(arr) >= 0):
            raise DomainError("grid values must be strictly decreasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def dyadic(cls, first: int, last: int) -> "EpsGrid":
        """``2**-first, ..., 2**-last``."""
        return cls(tuple(2.0 ** -k for k in range(first, last + 1)))

    @classmethod
    def default_1d(cls) -> "EpsGrid":
        return cls.dyadic(4, 27)

    @classmethod
    def default_2d(cls) -> "EpsGrid":
        return cls.dyadic(2, 12)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


@dataclass(frozen=True)
class DimensionEstimate:
    """Fitted dimension plus enough diagnostics to audit the model choice.

    ``d`` is clipped into ``[0, ambient]``; ``d_raw`` keeps the unclipped
    regression value.  ``epsilons``/``measures`` are the pairs actually used.
    """

    d: float
    log_exponent: float
    model: str
    residual: float
    stderr_d: float
    ambient: int
    d_raw: float = float("nan")
    d_power: float = float("nan")
    d_powerlog: float = float("nan")
    residual_power: float = float("nan")
    residual_powerlog: float = float("nan")
    epsilons: tuple = field(default=(), repr=False)
    measures: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in (
            "d", "log_exponent", "model", "residual", "stderr_d", "ambient", "d_raw",
            "d_power", "d_powerlog", "residual_power", "residual_powerlog")}
        out["epsilons"] = list(self.epsilons)
        out["measures"] = list(self.measures)
        return out


@dataclass(frozen=True)
class _OLS:
    coef: np.ndarray
    residual: float
    stderr: np.ndarray


def _ols(X: np.ndarray, y: np.ndarray) -> _OLS:
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise FitError("regression design is rank deficient")
    resid = y - X @ coef
    n, k = X.shape
    rms = float(np.sqrt(np.mean(resid**2)))
    dof = max(n - k, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return _OLS(coef, rms, np.sqrt(np.maximum(np.diag(cov), 0.0)))


@dataclass(frozen=True)
class LogLogFit:
    """Raw slopes of both models and the selection outcome."""

    slope_power: float
    slope_powerlog: float
    lam: float
    residual_power: float
    residual_powerlog: float
    stderr_power: float
    stderr_powerlog: float
    selected: str

    @property
    def slope(self) -> float:
        return self.slope_power if self.selected == POWER else self.slope_powerlog

    @property
    def log_exponent(self) -> float:
        return self.lam if self.selected == POWER_LOG else 0.0

    @property
    def residual(self) -> float:
        return self.residual_power if self.selected == POWER else self.residual_powerlog

    @property
    def stderr(self) -> float:
        return self.stderr_power if self.selected == POWER else self.stderr_powerlog


def fit_loglog(x: Sequence[float], m: Sequence[float], config: FitConfig | None = None) -> LogLogFit:
    """Fit ``log m`` against ``log x`` with and without the ``log(-log x)`` term."""
    cfg = config or FitConfig()
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    if x.shape != m.shape or x.ndim != 1:
        raise DomainError("scales and measures must be 1-D arrays of equal length")
    if x.size < 5:
        raise DomainError("at least 5 pairs are required")
    if np.any(~(m > 0)) or not np.all(np.isfinite(m)):
        raise DomainError("measures must be finite and positive")
    if np.any(~(x > 0)) or np.any(x >= 1):
        raise DomainError("scales must lie in (0, 1)")
    if np.unique(x).size == 1:
        raise FitError("all scales are equal")
    if np.unique(x).size != x.size:
        raise FitError("scales must be distinct")
    L = np.log(x)
    y = np.log(m)
    one = np.ones_like(L)
    p = _ols(np.column_stack([L, one]), y)
    pl = _ols(np.column_stack([L, np.log(-L), one]), y)
    use_log = (p.residual > cfg.residual_floor
               and p.residual > cfg.threshold * pl.residual)
    return LogLogFit(
        slope_power=float(p.coef[0]),
        slope_powerlog=float(pl.coef[0]),
        lam=float(pl.coef[1]),
        residual_power=p.residual,
        residual_powerlog=pl.residual,
        stderr_power=float(p.stderr[0]),
        stderr_powerlog=float(pl.stderr[0]),
        selected=POWER_LOG if use_log else POWER,
    )


def _pairs(measure_pairs: Iterable) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(list(measure_pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("measure_pairs must be a sequence of (epsilon, measure)")
    return arr[:, 0], arr[:, 1]


def fit_scaling(measure_pairs: Iterable, ambient: int, config: FitConfig | None = None) -> DimensionEstimate:
    """Regress ``log m = (ambient - d) log eps + lam log(-log eps) + c`` over all pairs."""
    if ambient not in (1, 2):
        raise DomainError("ambient must be 1 or 2")
    eps, m = _pairs(measure_pairs)
    fit = fit_loglog(eps, m, config)
    d_raw = ambient - fit.slope
    return DimensionEstimate(
        d=float(min(max(d_raw, 0.0), ambient)),
        log_exponent=fit.log_exponent,
        model=fit.selected,
        residual=fit.residual,
        stderr_d=fit.stderr,
        ambient=ambient,
        d_raw=float(d_raw),
        d_power=float(ambient - fit.slope_power),
        d_powerlog=float(ambient - fit.slope_powerlog),
        residual_power=fit.residual_power,
        residual_powerlog=fit.residual_powerlog,
        epsilons=tuple(float(e) for e in eps),
        measures=tuple(float(v) for v in m),
    )


def regression_window(eps: np.ndarray, m: np.ndarray, config: FitConfig) -> tuple[np.ndarray, np.ndarray]:
    """Drop the ``drop_largest`` coarsest scales (transient regime)."""
    order = np.argsort(eps)[::-1][config.drop_largest:]
    return eps[order], m[order]
