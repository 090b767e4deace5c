import os
import subprocess
import sys

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from saddle_fractal import _kernels
from saddle_fractal.orbits1d import MapModel


@given(st.lists(st.floats(0, 1), min_size=1, max_size=50), st.floats(1e-6, 0.5))
def test_union_length_paths_agree(values, eps):
    x = np.sort(np.array(values))
    a = _kernels._union_length_loop(x, eps)
    b = _kernels.union_length_numpy(x, eps)
    assert abs(a - b) <= 1e-12


def test_iterate_paths_agree():
    for variant in ("parabolic", "parabolic-log", "linear", "power"):
        m = MapModel(variant)
        a = _kernels._iterate_loop(m.kind, m.alpha, m.C, m.kappa, m.beta, 0.5, 500, 1e-9)
        b = _kernels.iterate_kernel(m.kind, m.alpha, m.C, m.kappa, m.beta, 0.5, 500, 1e-9)
        assert np.array_equal(a, b)
        # the orbit is the map applied to its own predecessors
        np.testing.assert_array_equal(b[1:], _kernels.evaluate_numpy(m.kind, m.alpha, m.C, m.kappa,
                                                                     m.beta, b[:-1]))


def test_numpy_backend_flag():
    env = dict(os.environ, SADDLE_FRACTAL_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "import saddle_fractal as s; print(s.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
