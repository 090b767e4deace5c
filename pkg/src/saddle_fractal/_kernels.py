"""Hot inner loops: orbit iteration, interval-union length, segment rasterization.

Every kernel has a numba body (compiled through :func:`_accel.jit`) and a
numpy counterpart.  The public ``*_kernel`` names dispatch on
``_accel.USE_NUMBA``; the ``*_numpy`` and ``*_loop`` names stay importable so
tests and the benchmark can compare both paths directly.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, jit

# map variant codes shared with orbits1d.MapModel
PARABOLIC = 0
PARABOLIC_LOG = 1
LINEAR_HYPERBOLIC = 2
POWER_HYPERBOLIC = 3


# ---------------------------------------------------------------------------
# orbit iteration
# ---------------------------------------------------------------------------


def _g_scalar(kind, alpha, coef, kappa, beta, s):
    if kind == PARABOLIC:
        return s - coef * s**alpha
    if kind == PARABOLIC_LOG:
        return s - coef * s**alpha * (-math.log(s))
    if kind == LINEAR_HYPERBOLIC:
        return kappa * s
    return coef * s**beta


_g_jit = jit(_g_scalar)


def _iterate_loop(kind, alpha, coef, kappa, beta, s0, max_points, floor):
    out = np.empty(max_points)
    out[0] = s0
    n = 1
    s = s0
    while n < max_points:
        s_next = _g_jit(kind, alpha, coef, kappa, beta, s)
        if not (s_next < s) or s_next < floor:
            break
        out[n] = s_next
        s = s_next
        n += 1
    return out[:n]


_iterate_jit = jit(_iterate_loop)


def iterate_kernel(kind, alpha, coef, kappa, beta, s0, max_points, floor):
    """Orbit ``s0, g(s0), ...`` stopping at ``max_points`` or below ``floor``."""
    fn = _iterate_jit if USE_NUMBA else _iterate_loop
    return fn(int(kind), float(alpha), float(coef), float(kappa), float(beta),
              float(s0), int(max_points), float(floor))


def evaluate_numpy(kind, alpha, coef, kappa, beta, s):
    s = np.asarray(s, dtype=float)
    if kind == PARABOLIC:
        return s - coef * s**alpha
    if kind == PARABOLIC_LOG:
        return s - coef * s**alpha * (-np.log(s))
    if kind == LINEAR_HYPERBOLIC:
        return kappa * s
    return coef * s**beta


# ---------------------------------------------------------------------------
# union of equal-width intervals around sorted points
# ---------------------------------------------------------------------------
# For points x_0 <= ... <= x_n the union of [x_i - e, x_i + e] has length
# 2e + sum_i min(x_{i+1} - x_i, 2e): one pass, exact.


def _union_length_loop(x_sorted, eps):
    w = 2.0 * eps
    total = w
    for i in range(x_sorted.shape[0] - 1):
        gap = x_sorted[i + 1] - x_sorted[i]
        total += gap if gap < w else w
    return total


_union_length_jit = jit(_union_length_loop)


def union_length_numpy(x_sorted, eps):
    w = 2.0 * eps
    return w + float(np.minimum(np.diff(x_sorted), w).sum())


def union_length_kernel(x_sorted, eps):
    if USE_NUMBA:
        return float(_union_length_jit(x_sorted, float(eps)))
    return union_length_numpy(x_sorted, float(eps))


# ---------------------------------------------------------------------------
# exact rasterization of polylines onto half-open square cells
# ---------------------------------------------------------------------------
# A closed segment meets cell (i, j) = [i e, (i+1) e) x [j e, (j+1) e) iff one of
# the following points lies in it: an endpoint, a grid-line crossing, or the
# midpoint between two consecutive breakpoints.  Crossing points get their
# line index assigned directly so round-off cannot push them across the line.


def _mark(bitmap, i, j, i0, j0):
    bitmap[i - i0, j - j0] = True


_mark_jit = jit(_mark)


def _clamp(v, lo, hi):
    return lo if v < lo else (hi if v > hi else v)


_clamp = jit(_clamp)


def _raster_loop(xs, ys, offsets, inv, i0, j0, bitmap):
    n_lines = offsets.shape[0] - 1
    for c in range(n_lines):
        a = offsets[c]
        b = offsets[c + 1]
        if b - a == 1:
            _mark_jit(bitmap, int(math.floor(xs[a] * inv)), int(math.floor(ys[a] * inv)), i0, j0)
            continue
        for k in range(a, b - 1):
            x0 = xs[k]
            y0 = ys[k]
            dx = xs[k + 1] - x0
            dy = ys[k + 1] - y0
            # cell range of the segment; rounded crossing points are clamped into it
            ilo = int(math.floor(min(x0, xs[k + 1]) * inv))
            ihi = int(math.floor(max(x0, xs[k + 1]) * inv))
            jlo = int(math.floor(min(y0, ys[k + 1]) * inv))
            jhi = int(math.floor(max(y0, ys[k + 1]) * inv))
            _mark_jit(bitmap, int(math.floor(x0 * inv)), int(math.floor(y0 * inv)), i0, j0)
            # next vertical / horizontal grid line in the direction of travel
            if dx > 0.0:
                kx = math.floor(x0 * inv) + 1.0
                sx = 1.0
            elif dx < 0.0:
                kx = math.ceil(x0 * inv) - 1.0
                sx = -1.0
            else:
                kx = 0.0
                sx = 0.0
            if dy > 0.0:
                ky = math.floor(y0 * inv) + 1.0
                sy = 1.0
            elif dy < 0.0:
                ky = math.ceil(y0 * inv) - 1.0
                sy = -1.0
            else:
                ky = 0.0
                sy = 0.0
            t_prev = 0.0
            while True:
                tx = (kx / inv - x0) / dx if sx != 0.0 else 2.0
                ty = (ky / inv - y0) / dy if sy != 0.0 else 2.0
                t = tx if tx < ty else ty
                if t >= 1.0:
                    break
                if t > t_prev:
                    tm = 0.5 * (t_prev + t)
                    _mark_jit(bitmap, _clamp(int(math.floor((x0 + tm * dx) * inv)), ilo, ihi),
                              _clamp(int(math.floor((y0 + tm * dy) * inv)), jlo, jhi), i0, j0)
                if tx == t:
                    ci = int(kx)
                else:
                    ci = int(math.floor((x0 + t * dx) * inv))
                if ty == t:
                    cj = int(ky)
                else:
                    cj = int(math.floor((y0 + t * dy) * inv))
                _mark_jit(bitmap, _clamp(ci, ilo, ihi), _clamp(cj, jlo, jhi), i0, j0)
                if tx == t:
                    kx += sx
                if ty == t:
                    ky += sy
                t_prev = t
            if t_prev < 1.0:
                tm = 0.5 * (t_prev + 1.0)
                _mark_jit(bitmap, _clamp(int(math.floor((x0 + tm * dx) * inv)), ilo, ihi),
                          _clamp(int(math.floor((y0 + tm * dy) * inv)), jlo, jhi), i0, j0)
        _mark_jit(bitmap, int(math.floor(xs[b - 1] * inv)), int(math.floor(ys[b - 1] * inv)), i0, j0)


_raster_jit = jit(_raster_loop)


def _line_crossings(p0, p1, inv, seg_idx):
    """Parameters and line indices of all grid-line crossings along one axis."""
    d = p1 - p0
    lo = np.minimum(p0, p1)
    hi = np.maximum(p0, p1)
    k_lo = np.ceil(lo * inv)
    k_hi = np.floor(hi * inv)
    moving = d != 0.0
    counts = np.where(moving, np.maximum(k_hi - k_lo + 1, 0), 0).astype(np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0), np.empty(0)
    rep = np.repeat(np.arange(len(p0)), counts)
    starts = np.cumsum(counts) - counts
    within = np.arange(total) - np.repeat(starts, counts)
    k = k_lo[rep] + within
    t = (k / inv - p0[rep]) / d[rep]
    return seg_idx[rep], t, k


def raster_numpy(xs, ys, offsets, inv, i0, j0, bitmap, chunk=200_000):
    """Vectorized equivalent of the loop kernel, processed in segment chunks."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    starts = offsets[:-1]
    ends = offsets[1:]
    # every vertex is a sample; single-vertex polylines contribute only that
    bitmap[np.floor(xs * inv).astype(np.int64) - i0,
           np.floor(ys * inv).astype(np.int64) - j0] = True
    seg_mask = np.ones(len(xs), dtype=bool)
    seg_mask[ends - 1] = False
    seg_start = np.flatnonzero(seg_mask)
    for c0 in range(0, len(seg_start), chunk):
        idx = seg_start[c0:c0 + chunk]
        x0 = xs[idx]
        y0 = ys[idx]
        dx = xs[idx + 1] - x0
        dy = ys[idx + 1] - y0
        local = np.arange(len(idx))
        # cell range of each segment; rounded crossing points are clamped into it
        x1 = xs[idx + 1]
        y1 = ys[idx + 1]
        ilo = np.floor(np.minimum(x0, x1) * inv).astype(np.int64)
        ihi = np.floor(np.maximum(x0, x1) * inv).astype(np.int64)
        jlo = np.floor(np.minimum(y0, y1) * inv).astype(np.int64)
        jhi = np.floor(np.maximum(y0, y1) * inv).astype(np.int64)
        sx, tx, kx = _line_crossings(x0, x1, inv, local)
        sy, ty, ky = _line_crossings(y0, y1, inv, local)
        # crossing points: the crossed line index is exact on its own axis
        px = np.clip(np.floor((y0[sx] + tx * dy[sx]) * inv).astype(np.int64), jlo[sx], jhi[sx])
        bitmap[kx.astype(np.int64) - i0, px - j0] = True
        py = np.clip(np.floor((x0[sy] + ty * dx[sy]) * inv).astype(np.int64), ilo[sy], ihi[sy])
        bitmap[py - i0, ky.astype(np.int64) - j0] = True
        # midpoints between consecutive breakpoints of each segment
        seg = np.concatenate([local, local, sx, sy])
        tt = np.concatenate([np.zeros(len(idx)), np.ones(len(idx)), tx, ty])
        order = np.lexsort((tt, seg))
        seg = seg[order]
        tt = tt[order]
        same = seg[1:] == seg[:-1]
        tm = 0.5 * (tt[1:] + tt[:-1])[same]
        sm = seg[1:][same]
        mx = np.clip(np.floor((x0[sm] + tm * dx[sm]) * inv).astype(np.int64), ilo[sm], ihi[sm])
        my = np.clip(np.floor((y0[sm] + tm * dy[sm]) * inv).astype(np.int64), jlo[sm], jhi[sm])
        bitmap[mx - i0, my - j0] = True
    return bitmap


def raster_kernel(xs, ys, offsets, inv, i0, j0, bitmap):
    if USE_NUMBA:
        _raster_jit(xs, ys, offsets, float(inv), int(i0), int(j0), bitmap)
    else:
        raster_numpy(xs, ys, offsets, float(inv), int(i0), int(j0), bitmap)
    return bitmap
