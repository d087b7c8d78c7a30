from __future__ import annotations

from .likelihood import gaussian_log_likelihood, log_likelihood, residuals
from .metrics import clip, hellinger_profile, hellinger_squared
from .prior import (
    InfeasibleSpacingError,
    InvalidSampleSizeError,
    Schedule,
    knot_log_density,
    log_prior,
    sample_knots,
    schedule,
    support_violations,
)
from .state import LabsState, TruthSpec
from .theory import admissible_degree, contraction_rate, l2_transfer_bound

__all__ = [
    "InfeasibleSpacingError",
    "InvalidSampleSizeError",
    "LabsState",
    "Schedule",
    "TruthSpec",
    "admissible_degree",
    "clip",
    "contraction_rate",
    "gaussian_log_likelihood",
    "hellinger_profile",
    "hellinger_squared",
    "knot_log_density",
    "l2_transfer_bound",
    "log_likelihood",
    "log_prior",
    "residuals",
    "sample_knots",
    "schedule",
    "support_violations",
]
