"""Numerical toolkit for box dimensions of orbits and spiral trajectories near hyperbolic saddle loops."""

from ._accel import backend

__version__ = "0.1.0"
__all__ = ["backend", "__version__"]
