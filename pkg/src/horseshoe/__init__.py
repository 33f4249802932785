"""First-tangency parameters of the real Henon family f(x, y) = (x^2 - a - b y, x)."""

from .henon import HenonParams, apply, apply_inverse, fixed_points, find_cycle, cycle_multipliers
from .interval import Interval, ComplexRect, hull
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "HenonParams", "apply", "apply_inverse", "fixed_points", "find_cycle", "cycle_multipliers",
    "Interval", "ComplexRect", "hull", "BACKEND", "__version__",
]
