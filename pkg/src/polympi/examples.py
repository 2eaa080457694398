"""A quadratic planar system and three unit-ball constraint sets.

``QUADRATIC_DYNAMICS`` has the origin as its only fixed point, with
linearization ``[[1/2, -1], [0, 1/2]]``. ``QUADRATIC_DYNAMICS_UNSQUARED``
drops the square on the last term of the second component; its origin is
a saddle, so the set recursion does not terminate for it.
"""

from __future__ import annotations

from fractions import Fraction

from .engine import EXPLICIT, Problem
from .globopt import SolverConfig
from .interval import Box
from .poly import PolyMap

QUADRATIC_DYNAMICS = (
    "1/2*x1 - x1^2 - x2",
    "1/2*x1^2 + 1/2*x2 - (1/2*x1 - x1^2 - x2)^2",
)

QUADRATIC_DYNAMICS_UNSQUARED = (
    "1/2*x1 - x1^2 - x2",
    "1/2*x1^2 + 1/2*x2 - (1/2*x1 - x1^2 - x2^2)",
)

BALLS = {
    "1-norm": ("1 - (x1 + x2)", "1 - (-x1 + x2)", "1 - (-x1 - x2)", "1 - (x1 - x2)"),
    "2-norm": ("1 - (x1^2 + x2^2)",),
    "inf-norm": ("1 - x1", "1 - x2", "1 + x1", "1 + x2"),
}

DOMAIN = ((-2, 2), (-2, 2))
RASTER_BOX = ((Fraction(-21, 20), Fraction(21, 20)), (Fraction(-21, 20), Fraction(21, 20)))


def dynamics(unsquared: bool = False) -> PolyMap:
    return PolyMap.parse(QUADRATIC_DYNAMICS_UNSQUARED if unsquared else QUADRATIC_DYNAMICS, 2)


def ball(name: str) -> PolyMap:
    try:
        return PolyMap.parse(BALLS[name], 2)
    except KeyError:
        raise KeyError(f"unknown constraint set {name!r}; choose from {sorted(BALLS)}") from None


def problem(name: str, mode: str = EXPLICIT, **options) -> Problem:
    """The quadratic system constrained to one of the unit balls."""
    options.setdefault("solver", SolverConfig())
    return Problem(dynamics(), ball(name), Box(DOMAIN), mode=mode, **options)
