"""Hyperbola families ``x^r y = c`` and the glued spiral model.

Arcs are sampled so that consecutive vertices are at most ``max_step`` apart
and every chord stays within ``sagitta`` of the curve.  Families with many
levels can be thinned to a target resolution: a level is dropped only when
it is sandwiched between two kept levels whose arcs are closer than the
resolution everywhere, so box counts at scales above twice the resolution
are unaffected.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._errors import DomainError
from .orbits1d import Orbit1D, power_transform

MAX_FAMILY_VERTICES = 10_000_000


@dataclass(frozen=True, eq=False)
class Polyline:
    """Ordered planar vertices with consecutive distance at most ``max_step``."""

    vertices: np.ndarray
    max_step: float

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] == 0:
            raise DomainError("vertices must be a nonempty (n, 2) array")
        if not self.max_step > 0:
            raise DomainError("max_step must be positive")
        if v.shape[0] > 1:
            step = np.hypot(*np.diff(v, axis=0).T).max()
            if step > self.max_step * (1 + 1e-12):
                raise DomainError(f"vertex spacing {step:g} exceeds max_step {self.max_step:g}")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return self.vertices.shape[0]

    @property
    def start(self) -> tuple[float, float]:
        return tuple(self.vertices[0])

    @property
    def end(self) -> tuple[float, float]:
        return tuple(self.vertices[-1])


def _arc_x(r: float, c: float, x_max: float, y_max: float, max_step: float, sagitta: float | None):
    x_lo = (c / y_max) ** (1.0 / r)
    if x_lo >= x_max:
        return np.array([x_max])
    h = max_step / math.sqrt(2.0)
    # uniform in x and in y: consecutive vertices then differ by <= h in both
    xa = np.linspace(x_lo, x_max, int(math.ceil((x_max - x_lo) / h)) + 1)
    y_lo = c / x_max**r
    ya = np.linspace(y_lo, y_max, int(math.ceil((y_max - y_lo) / h)) + 1)
    xb = (c / ya) ** (1.0 / r)
    parts = [xa, xb]
    if sagitta is not None:
        # log-uniform x bounds the chord error near the corner of the arc
        dlog = math.sqrt(8.0 * sagitta)
        span = math.log(x_max / x_lo)
        parts.append(np.exp(np.linspace(math.log(x_lo), math.log(x_max),
                                        int(math.ceil(span / dlog)) + 1)))
    x = np.unique(np.concatenate(parts))
    x = x[(x >= x_lo) & (x <= x_max)]
    x[0], x[-1] = x_lo, x_max
    return x


def hyperbola_arc(r: float, c: float, delta: float = 1.0, max_step: float = 1 / 64,
                  sagitta: float | None = None, *, x_max: float | None = None,
                  y_max: float | None = None) -> Polyline:
    """Arc of ``y = c / x^r`` inside the box ``(0, x_max] x (0, y_max]`` (both default to ``delta``)."""
    if not r > 0:
        raise DomainError("r must be positive")
    xm = float(delta if x_max is None else x_max)
    ym = float(delta if y_max is None else y_max)
    if not (0 < xm <= 1 and 0 < ym <= 1):
        raise DomainError("box sides must lie in (0, 1]")
    if not 0 < c <= xm**r * ym:
        raise DomainError(f"level c={c} outside (0, {xm**r * ym}]")
    if not max_step > 0:
        raise DomainError("max_step must be positive")
    if sagitta is not None and not sagitta > 0:
        raise DomainError("sagitta must be positive")
    x = _arc_x(r, c, xm, ym, max_step, sagitta)
    return Polyline(np.column_stack([x, c / x**r]), max_step)


@dataclass(frozen=True, eq=False)
class HyperbolaFamily:
    """Level curves ``x^r y = c`` for ``c`` in ``levels`` inside ``(0, x_max] x (0, y_max]``."""

    r: float
    levels: Orbit1D
    delta: float = 1.0
    x_max: float = field(default=None)
    y_max: float = field(default=None)

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("r must be positive")
        if not 0 < self.delta <= 1:
            raise DomainError("delta must lie in (0, 1]")
        if self.x_max is None:
            object.__setattr__(self, "x_max", float(self.delta))
        if self.y_max is None:
            object.__setattr__(self, "y_max", float(self.delta))
        top = self.x_max**self.r * self.y_max
        if self.levels.points[0] > top * (1 + 1e-15):
            raise DomainError(f"levels must lie in (0, {top}]")

    def arcs(self, max_step: float = 1 / 64, sagitta: float | None = None,
             resolution: float | None = None) -> list[Polyline]:
        """One polyline per level, or per kept level when ``resolution`` is given."""
        levels = self.levels.points
        if resolution is not None:
            levels = thin_levels(levels, self.r, resolution)
        out, total = [], 0
        for c in levels:
            arc = hyperbola_arc(self.r, float(c), max_step=max_step, sagitta=sagitta,
                                x_max=self.x_max, y_max=self.y_max)
            total += len(arc)
            if total > MAX_FAMILY_VERTICES:
                raise DomainError("family exceeds the vertex cap; pass a resolution or larger steps")
            out.append(arc)
        return out


def family_from_orbit(r: float, S: Orbit1D, delta: float = 1.0) -> HyperbolaFamily:
    """Family whose levels are the orbit values (the trace on ``{x = 1}`` when delta = 1)."""
    return HyperbolaFamily(r, S, delta)


def transversal_trace(family: HyperbolaFamily, which: str = "vertical") -> Orbit1D:
    """Intersections with ``{x = x_max}`` ("vertical") or ``{y = y_max}`` ("horizontal")."""
    S = family.levels
    if which == "vertical":
        if family.x_max == 1.0:
            return S
        return Orbit1D(S.points / family.x_max**family.r, floor=S.floor, burn_in=S.burn_in)
    if which == "horizontal":
        base = S if family.y_max == 1.0 else Orbit1D(S.points / family.y_max, floor=S.floor,
                                                     burn_in=S.burn_in)
        return power_transform(base, 1.0 / family.r)
    raise DomainError("which must be 'vertical' or 'horizontal'")


def symmetrize_point(x, y, r: float):
    """``(x, y) -> (x^r, y)``, mapping ``x^r y = c`` onto ``u y = c``."""
    return np.asarray(x, dtype=float) ** r, np.asarray(y, dtype=float)


def symmetrize(family: HyperbolaFamily) -> HyperbolaFamily:
    """The same levels with ratio 1; the box becomes ``(0, x_max^r] x (0, y_max]``."""
    return HyperbolaFamily(1.0, family.levels, family.delta,
                           x_max=family.x_max**family.r, y_max=family.y_max)


def thin_levels(levels: Sequence[float], r: float, resolution: float) -> np.ndarray:
    """Drop levels whose arcs are resolution-indistinguishable from their neighbors.

    The largest distance between the arcs of ``c' > c`` is bounded by
    ``(c' - c) / (r c)^(r / (r + 1))``.  Kept levels either are consecutive in
    the input or lie within ``resolution`` of each other, so every dropped arc
    is sandwiched between two kept arcs closer than ``resolution``.  The
    first and last levels are always kept.
    """
    lv = np.asarray(levels, dtype=float)
    if lv.size <= 2:
        return lv.copy()
    if not resolution > 0:
        raise DomainError("resolution must be positive")
    expo = r / (r + 1.0)
    scale = (r * lv) ** expo
    keep = [0]
    last = lv[0]
    for i in range(1, lv.size):
        if (last - lv[i]) / scale[i] > resolution:
            if keep[-1] != i - 1:
                keep.append(i - 1)
                last = lv[i - 1]
            if (last - lv[i]) / scale[i] > resolution:
                keep.append(i)
                last = lv[i]
    if keep[-1] != lv.size - 1:
        keep.append(lv.size - 1)
    return lv[np.array(keep)]


@dataclass(frozen=True, eq=False)
class SpiralModel:
    """Arcs near the saddle plus flow-box strip segments of length ``strip_length``.

    Segment ``n`` runs from ``(x_max, y_n)`` to ``(x_max + strip_length, y_n)``
    where ``y_n`` is the vertical trace of level ``n``.
    """

    family: HyperbolaFamily
    strip_trace: Orbit1D
    strip_length: float = 1.0

    def __post_init__(self):
        if not self.strip_length > 0:
            raise DomainError("strip length must be positive")
        trace = transversal_trace(self.family, "vertical")
        if not np.array_equal(trace.points, self.strip_trace.points):
            raise DomainError("strip trace must equal the family's vertical trace")

    def polylines(self, max_step: float = 1 / 64, sagitta: float | None = None,
                  resolution: float | None = None) -> list[Polyline]:
        fam = self.family
        levels = fam.levels.points
        if resolution is not None:
            levels = thin_levels(levels, fam.r, resolution)
        sub = HyperbolaFamily(fam.r, Orbit1D(levels, floor=fam.levels.floor),
                              fam.delta, fam.x_max, fam.y_max)
        arcs = sub.arcs(max_step=max_step, sagitta=sagitta)
        x0 = fam.x_max
        n_seg = int(math.ceil(self.strip_length / max_step))
        xs = np.linspace(x0, x0 + self.strip_length, n_seg + 1)
        strips = []
        for c in levels:
            y = c / x0**fam.r
            strips.append(Polyline(np.column_stack([xs, np.full_like(xs, y)]), max_step))
        return arcs + strips


def assemble_spiral(S: Orbit1D, r: float = 1.0, delta: float = 1.0, length: float = 1.0,
                    max_step: float = 1 / 64, sagitta: float | None = None,
                    resolution: float | None = None) -> list[Polyline]:
    """Arcs and strip segments: ``2 |S|`` polylines, or twice the kept levels if thinned."""
    fam = family_from_orbit(r, S, delta)
    return SpiralModel(fam, transversal_trace(fam, "vertical"), length).polylines(
        max_step=max_step, sagitta=sagitta, resolution=resolution)


def write_polylines_csv(path, polylines: Iterable) -> int:
    """Write ``curve_id,x,y`` rows; returns the number of vertex rows."""
    rows = 0
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["curve_id", "x", "y"])
        for cid, p in enumerate(polylines):
            v = np.asarray(getattr(p, "vertices", p), dtype=float)
            for x, y in v:
                w.writerow([cid, repr(float(x)), repr(float(y))])
                rows += 1
    return rows


def read_polylines_csv(path) -> list[np.ndarray]:
    """Inverse of :func:`write_polylines_csv` (vertex arrays grouped by curve id)."""
    groups: dict[int, list] = {}
    with open(path, newline="", encoding="ascii") as fh:
        for row in csv.DictReader(fh):
            groups.setdefault(int(row["curve_id"]), []).append((float(row["x"]), float(row["y"])))
    return [np.array(groups[k]) for k in sorted(groups)]
