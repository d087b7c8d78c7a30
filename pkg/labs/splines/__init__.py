from __future__ import annotations

from .basis import (
    InvalidKnotsError,
    KnotVector,
    NoBasisError,
    SplineAtom,
    bspline_basis,
    bspline_eval,
    design_matrix,
    function_eval,
    function_values,
    min_spacing,
)
from .bounds import BoundInapplicableError, coefficient_knot_bound, lipschitz_bound

__all__ = [
    "BoundInapplicableError",
    "InvalidKnotsError",
    "KnotVector",
    "NoBasisError",
    "SplineAtom",
    "bspline_basis",
    "bspline_eval",
    "coefficient_knot_bound",
    "design_matrix",
    "function_eval",
    "function_values",
    "lipschitz_bound",
    "min_spacing",
]
