"""Box-dimension estimators for orbits (1-D) and polyline sets (2-D)."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .._errors import DomainError
from ..orbits1d import Orbit1D, eps_neighborhood_length
from .boxcount import PackedPolylines, count_cells
from .fitting import DimensionEstimate, EpsGrid, FitConfig, fit_scaling, regression_window

log = logging.getLogger(__name__)


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def sequence_measures(orbit: Orbit1D, grid: EpsGrid | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Scales and exact neighborhood lengths; the default grid is clipped to ``10 * floor``."""
    if grid is None:
        eps = EpsGrid.default_1d().as_array()
        eps = eps[eps >= 10 * orbit.floor]
    else:
        eps = grid.as_array()
        if np.any(eps < 10 * orbit.floor):
            raise DomainError(f"grid goes below 10 * floor = {10 * orbit.floor:g}")
    m = np.array([eps_neighborhood_length(orbit, e) for e in eps])
    return eps, m


def box_dim_sequence(orbit: Orbit1D, grid: EpsGrid | None = None,
                     config: FitConfig | None = None) -> DimensionEstimate:
    """1-D estimate from exact interval-union lengths."""
    cfg = config or FitConfig()
    eps, m = sequence_measures(orbit, grid)
    eps, m = regression_window(eps, m, cfg)
    est = fit_scaling(zip(eps, m), ambient=1, config=cfg)
    log.debug("orbit fit: d=%.4f model=%s ratio=%.2f", est.d, est.model,
              est.residual_power / max(est.residual_powerlog, 1e-300))
    return est


def planar_measures(polylines, grid: EpsGrid | None = None, jobs: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Scales and ``count(eps) * eps**2`` for each scale."""
    packed = PackedPolylines.from_polylines(polylines)
    eps = (grid or EpsGrid.default_2d()).as_array()
    counts = _map(lambda e: count_cells(packed, e), list(eps), jobs)
    return eps, np.asarray(counts, dtype=float) * eps**2


def box_dim_planar(polylines, grid: EpsGrid | None = None, config: FitConfig | None = None,
                   jobs: int = 1) -> DimensionEstimate:
    """2-D estimate from exact box counts; ``jobs`` threads split the scales."""
    cfg = config or FitConfig()
    eps, m = planar_measures(polylines, grid, jobs)
    eps, m = regression_window(eps, m, cfg)
    est = fit_scaling(zip(eps, m), ambient=2, config=cfg)
    log.debug("planar fit: d=%.4f model=%s", est.d, est.model)
    return est
