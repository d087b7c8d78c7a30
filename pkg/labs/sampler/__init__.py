from __future__ import annotations

from .chain import ChainOutput, NoDrawsError, TraceRow, default_scales, posterior_mean, run_chain
from .diagnostics import monte_carlo_se, summarize_chain, write_trace
from .gibbs import (
    ConditioningError,
    beta_posterior,
    gibbs_beta_joint,
    gibbs_M,
    gibbs_sigma2,
    sigma2_posterior,
    sigma2_prior_moments,
)
from .moves import (
    MoveKind,
    UpdateResult,
    birth_log_ratio,
    choose_move,
    death_log_ratio,
    effective_move_probs,
    metropolis_accept,
    update_move,
)

__all__ = [
    "ChainOutput",
    "ConditioningError",
    "MoveKind",
    "NoDrawsError",
    "TraceRow",
    "UpdateResult",
    "beta_posterior",
    "birth_log_ratio",
    "choose_move",
    "death_log_ratio",
    "default_scales",
    "effective_move_probs",
    "gibbs_M",
    "gibbs_beta_joint",
    "gibbs_sigma2",
    "metropolis_accept",
    "monte_carlo_se",
    "posterior_mean",
    "run_chain",
    "sigma2_posterior",
    "sigma2_prior_moments",
    "summarize_chain",
    "update_move",
    "write_trace",
]
