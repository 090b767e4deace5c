"""Numba toggle shared by the hot kernels.

Set ``SADDLE_FRACTAL_NUMBA=0`` before import to force the pure-numpy paths.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("SADDLE_FRACTAL_NUMBA", "1").strip().lower()

try:
    import numba  # noqa: F401

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and _FLAG not in ("0", "false", "no", "off")


def jit(func):
    """``numba.njit(cache=True, nogil=True)`` when enabled, identity otherwise."""
    if USE_NUMBA:
        import numba

        return numba.njit(cache=True, nogil=True)(func)
    return func


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
