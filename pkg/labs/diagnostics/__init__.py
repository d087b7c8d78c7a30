from __future__ import annotations

from .besov import (
    GridAlignmentError,
    GridFunction,
    besov_norm_estimate,
    besov_profile,
    besov_seminorm_estimate,
    default_t_grid,
    empirical_slope,
    finite_difference,
    lp_norm,
    modulus_of_smoothness,
)

__all__ = [
    "GridAlignmentError",
    "GridFunction",
    "besov_norm_estimate",
    "besov_profile",
    "besov_seminorm_estimate",
    "default_t_grid",
    "empirical_slope",
    "finite_difference",
    "lp_norm",
    "modulus_of_smoothness",
]
