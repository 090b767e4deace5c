"""Exact box counting of planar polylines on half-open square cells.

Each polyline segment is traversed cell by cell, so a cell is counted iff the
closed segment meets it.  The result does not depend on vertex density; the
only geometric approximation is the chord itself, which the samplers in
``geometry`` keep within a requested sagitta of the true curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .. import _kernels
from .._errors import DomainError

MAX_BITMAP_CELLS = 1 << 28


@dataclass(frozen=True, eq=False)
class PackedPolylines:
    """Concatenated vertex arrays with polyline offsets, reused across scales."""

    xs: np.ndarray
    ys: np.ndarray
    offsets: np.ndarray

    @classmethod
    def from_polylines(cls, polylines: Iterable) -> "PackedPolylines":
        if isinstance(polylines, PackedPolylines):
            return polylines
        arrays = []
        for p in polylines:
            v = np.asarray(getattr(p, "vertices", p), dtype=float)
            if v.ndim == 1 and v.size == 2:
                v = v.reshape(1, 2)
            if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] == 0:
                raise DomainError("each polyline must be a nonempty (n, 2) array")
            arrays.append(v)
        if not arrays:
            raise DomainError("no polylines given")
        allv = np.concatenate(arrays)
        if not np.all(np.isfinite(allv)):
            raise DomainError("polyline vertices must be finite")
        offsets = np.zeros(len(arrays) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([a.shape[0] for a in arrays])
        return cls(np.ascontiguousarray(allv[:, 0]), np.ascontiguousarray(allv[:, 1]), offsets)

    @property
    def n_vertices(self) -> int:
        return self.xs.size

    @property
    def n_polylines(self) -> int:
        return self.offsets.size - 1


@dataclass(frozen=True, eq=False)
class CellGrid:
    """Unique indices ``(i, j)`` of cells ``[i e, (i+1) e) x [j e, (j+1) e)``."""

    epsilon: float
    cells: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return int(self.cells.shape[0])


def _bitmap(packed: PackedPolylines, epsilon: float, max_cells: int):
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    inv = 1.0 / epsilon
    i0 = math.floor(packed.xs.min() * inv)
    i1 = math.floor(packed.xs.max() * inv)
    j0 = math.floor(packed.ys.min() * inv)
    j1 = math.floor(packed.ys.max() * inv)
    shape = (i1 - i0 + 1, j1 - j0 + 1)
    if shape[0] * shape[1] > max_cells:
        raise DomainError(f"bounding box needs {shape[0] * shape[1]} cells at eps={epsilon}; "
                          f"limit is {max_cells}")
    bitmap = np.zeros(shape, dtype=np.bool_)
    _kernels.raster_kernel(packed.xs, packed.ys, packed.offsets, inv, i0, j0, bitmap)
    return bitmap, i0, j0


def box_count(polylines, epsilon: float, max_cells: int = MAX_BITMAP_CELLS) -> CellGrid:
    """All cells met by the polylines (a single vertex is a degenerate polyline)."""
    packed = PackedPolylines.from_polylines(polylines)
    bitmap, i0, j0 = _bitmap(packed, float(epsilon), max_cells)
    cells = np.argwhere(bitmap).astype(np.int64)
    cells[:, 0] += i0
    cells[:, 1] += j0
    return CellGrid(float(epsilon), cells)


def count_cells(polylines, epsilon: float, max_cells: int = MAX_BITMAP_CELLS) -> int:
    """Number of cells met, without materializing the index list."""
    packed = PackedPolylines.from_polylines(polylines)
    bitmap, _, _ = _bitmap(packed, float(epsilon), max_cells)
    return int(np.count_nonzero(bitmap))
