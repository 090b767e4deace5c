import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from saddle_fractal._errors import DomainError
from saddle_fractal.dimension import EpsGrid, count_cells
from saddle_fractal.geometry import (HyperbolaFamily, Polyline, SpiralModel, assemble_spiral,
                                     family_from_orbit, hyperbola_arc, read_polylines_csv,
                                     symmetrize, symmetrize_point, thin_levels, transversal_trace,
                                     write_polylines_csv)
from saddle_fractal.orbits1d import MapModel, Orbit1D, generate_orbit


def chord_deviation(v0, v1, r, c):
    """Oracle: largest distance from the chord midpoint to the arc between its ends."""
    m = 0.5 * (v0 + v1)
    res = minimize_scalar(lambda x: np.hypot(x - m[0], c / x**r - m[1]), bounds=(v0[0], v1[0]),
                          method="bounded", options={"xatol": 1e-14})
    return res.fun


@given(st.floats(0.5, 3.0), st.floats(1e-3, 0.9), st.sampled_from([1 / 16, 1 / 64]))
def test_arc_vertices_on_curve_and_spaced(r, c, step):
    arc = hyperbola_arc(r, c, max_step=step)
    x, y = arc.vertices.T
    np.testing.assert_allclose(x**r * y, c, rtol=1e-12)
    assert np.hypot(*np.diff(arc.vertices, axis=0).T).max() <= step * (1 + 1e-12)
    assert x[0] == pytest.approx(c ** (1 / r)) and x[-1] == 1.0
    assert y[0] == pytest.approx(1.0) and np.all(np.diff(x) > 0)


@pytest.mark.parametrize("r,c", [(1.0, 1e-4), (2.0, 1e-3), (0.5, 1e-2)])
def test_sagitta_bound(r, c):
    sag = 2.0**-16
    arc = hyperbola_arc(r, c, max_step=1 / 64, sagitta=sag)
    v = arc.vertices
    # the chord midpoint is where a chord of a convex arc is farthest from it
    worst = max(chord_deviation(v[i], v[i + 1], r, c) for i in range(0, len(v) - 1, 3))
    assert worst <= sag


def test_polyline_spacing_is_enforced():
    with pytest.raises(DomainError):
        Polyline(np.array([[0.0, 0.0], [1.0, 0.0]]), max_step=0.5)
    with pytest.raises(DomainError):
        hyperbola_arc(1.0, 1.5)


def test_family_and_traces():
    S = Orbit1D(np.array([0.5, 0.25, 0.04]))
    fam = family_from_orbit(2.0, S)
    assert len(fam.arcs()) == 3
    assert transversal_trace(fam, "vertical") is S
    np.testing.assert_allclose(transversal_trace(fam, "horizontal").points, S.points**0.5)
    with pytest.raises(DomainError):
        transversal_trace(fam, "diagonal")


def test_symmetrize():
    S = Orbit1D(np.array([0.5, 0.1]))
    fam = HyperbolaFamily(2.0, S)
    sym = symmetrize(fam)
    assert sym.r == 1.0
    arc = fam.arcs()[1]
    u, y = symmetrize_point(*arc.vertices.T, 2.0)
    np.testing.assert_allclose(u * y, 0.1, rtol=1e-12)


def test_thinning_keeps_counts_above_resolution():
    S = generate_orbit(MapModel("parabolic"), 0.5, 20_000)
    fam = family_from_orbit(1.0, S)
    grid = EpsGrid.dyadic(3, 7)
    res = min(grid.values) / 2
    kept = thin_levels(S.points, 1.0, res)
    assert kept.size < len(S) / 10
    full = fam.arcs(sagitta=None)
    thin = fam.arcs(sagitta=None, resolution=res)
    for e in grid:
        assert count_cells(thin, e) == pytest.approx(count_cells(full, e), rel=0.02)


@given(st.lists(st.floats(1e-6, 0.99), min_size=3, max_size=60, unique=True), st.floats(1e-4, 0.1))
def test_thinning_sandwich(levels, res):
    lv = np.sort(levels)[::-1]
    kept = thin_levels(lv, 1.0, res)
    assert kept[0] == lv[0] and kept[-1] == lv[-1]
    # every dropped level lies between two consecutive kept levels within the resolution bound
    for c in np.setdiff1d(lv, kept):
        hi = kept[kept > c].min()
        lo = kept[kept < c].max()
        assert (hi - lo) / np.sqrt(lo) <= res * (1 + 1e-9)


def test_spiral_assembly():
    S = Orbit1D(np.array([0.5, 0.25, 0.125]))
    parts = assemble_spiral(S, length=2.0)
    assert len(parts) == 6
    strips = parts[3:]
    for c, seg in zip(S.points, strips):
        assert seg.start == (1.0, c) and seg.end == (3.0, c)
    fam = family_from_orbit(1.0, S)
    with pytest.raises(DomainError):
        SpiralModel(fam, Orbit1D(np.array([0.4, 0.2, 0.1])))


def test_csv_round_trip(tmp_path):
    S = Orbit1D(np.array([0.5, 0.25]))
    parts = assemble_spiral(S, max_step=1 / 8)
    path = tmp_path / "spiral.csv"
    rows = write_polylines_csv(path, parts)
    assert rows == sum(len(p) for p in parts)
    back = read_polylines_csv(path)
    assert len(back) == len(parts)
    for a, b in zip(parts, back):
        assert np.array_equal(a.vertices, b)
    assert path.read_text().splitlines()[0] == "curve_id,x,y"
