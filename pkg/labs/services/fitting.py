from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from labs.model.metrics import clip, hellinger_profile
from labs.model.state import TruthSpec
from labs.model.theory import l2_transfer_bound
from labs.sampler.chain import ChainOutput, posterior_mean, run_chain
from labs.sampler.diagnostics import summarize_chain
from labs.schemas.config import ChainConfig, HyperParams
from labs.schemas.results import FitDiagnostics, FitSummary
from labs.testbed.data import Dataset, mse
from labs.testbed.functions import truth_values

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitResult:
    output: ChainOutput
    summary: FitSummary
    grid: np.ndarray
    fitted_grid: np.ndarray


def truth_spec_for(data: Dataset, grid_size: int = 2**14) -> TruthSpec | None:
    """サイドカー付きのテスト関数データなら、y と同じスケールの真値仕様を返す。"""
    if data.function_id is None or not data.sigma0:
        return None
    fid, center, scale = data.function_id, data.center, data.scale

    def f0(xs: np.ndarray) -> np.ndarray:
        return (truth_values(fid, xs) - center) / scale

    clip_level = float(np.max(np.abs(f0(np.linspace(0.0, 1.0, grid_size)))))
    return TruthSpec(f0=f0, sigma0=float(data.sigma0), F=clip_level, label=fid.value)


def fit_diagnostics(output: ChainOutput, data: Dataset, truth: TruthSpec) -> FitDiagnostics:
    """事後平均 (f̂, σ̂) と (f₀, σ₀) の Hellinger 距離、clip 後の L² 誤差とその上界。"""
    fitted = posterior_mean(output, data.xs)
    f0_vals = truth.f0(data.xs)
    sigma_draws = np.sqrt(output.sigma2_draws())
    sigma_hat = float(np.mean(sigma_draws))
    d_nh = hellinger_profile(fitted, sigma_hat, f0_vals, truth.sigma0)
    clipped = clip(truth.F, fitted)
    clipped_l2 = float(np.sqrt(np.mean((clipped - f0_vals) ** 2)))
    sigma_upper = max(float(np.max(sigma_draws)), truth.sigma0)
    return FitDiagnostics(
        mse=mse(f0_vals, fitted),
        hellinger=d_nh,
        clip_level=truth.F,
        clipped_l2=clipped_l2,
        l2_bound=l2_transfer_bound(d_nh, truth.F, sigma_upper),
        sigma_error=abs(sigma_hat - truth.sigma0),
    )


def fit_dataset(
    data: Dataset,
    hyper: HyperParams,
    chain: ChainConfig,
    *,
    grid_size: int = 2**14,
) -> FitResult:
    """1つのデータセットにチェーンを走らせ、事後要約とグリッド上の事後平均を返す。"""
    if data.n < 1:
        raise ValueError("fit needs at least one observation")
    output = run_chain(data, hyper, chain)
    summary = summarize_chain(output)
    truth = truth_spec_for(data, grid_size)
    if truth is not None and output.draws:
        summary = summary.model_copy(update={"diagnostics": fit_diagnostics(output, data, truth)})
        logger.info(
            "Fit diagnostics: mse=%.4g d_nH=%.4g",
            summary.diagnostics.mse,
            summary.diagnostics.hellinger,
        )
    fitted_grid = posterior_mean(output) if output.draws else np.full(output.grid.size, math.nan)
    return FitResult(output=output, summary=summary, grid=output.grid, fitted_grid=fitted_grid)
