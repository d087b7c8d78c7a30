from __future__ import annotations

import logging
import math

import numpy as np
from scipy import linalg
from scipy.stats import invgamma

from labs.core.errors import LabsError
from labs.model.likelihood import residuals
from labs.model.prior import Schedule
from labs.model.state import LabsState
from labs.splines.basis import design_matrix
from labs.testbed.data import Dataset

logger = logging.getLogger(__name__)

JITTER_SCALE = 1e-10


class ConditioningError(LabsError, RuntimeError):
    """係数の事後精度行列がジッター付きでもコレスキー分解できないとき。"""


def sigma2_posterior(n: int, rss: float, r: float, R: float) -> tuple[float, float]:
    """σ² の条件付き事後 Inv-Gam(shape, scale) のパラメータ。"""
    return r / 2.0 + n / 2.0, (r * R + rss) / 2.0


def gibbs_sigma2(
    state: LabsState,
    data: Dataset,
    r: float,
    R: float,
    rng: np.random.Generator,
    *,
    bounds: tuple[float, float] | None = None,
    rss: float | None = None,
) -> float:
    """
    σ² ~ Inv-Gam(r/2 + n/2, (rR + RSS)/2) を引く。

    bounds があれば切断逆ガンマから逆CDF法で引く。rss を渡すと残差計算を省く。
    """
    if rss is None:
        resid = residuals(state, data) if data.n else np.empty(0)
        rss = float(resid @ resid)
    shape, scale = sigma2_posterior(data.n, rss, r, R)
    if bounds is None:
        return scale / rng.gamma(shape)

    lo, hi = bounds
    dist = invgamma(shape, scale=scale)
    cdf_lo, cdf_hi = dist.cdf(lo), dist.cdf(hi)
    if not cdf_hi > cdf_lo:
        # 区間の確率が数値的に0: 質量の偏っている端点を返す
        logger.warning("Truncated sigma^2 posterior has no numerical mass in [%s, %s].", lo, hi)
        return lo if scale / (shape + 1.0) < lo else hi
    value = float(dist.ppf(rng.uniform(cdf_lo, cdf_hi)))
    return min(max(value, lo), hi)


def gibbs_M(J_k: int, a_k: float, b_n: float, rng: np.random.Generator) -> float:
    """M_k ~ Gam(a_k + J_k, rate = b_n + 1)。"""
    if J_k < 0:
        raise ValueError("J_k must be nonnegative")
    return float(rng.gamma(a_k + J_k, 1.0 / (b_n + 1.0)))


def _factorize(precision: np.ndarray) -> np.ndarray:
    try:
        return linalg.cholesky(precision, lower=True)
    except linalg.LinAlgError:
        size = precision.shape[0]
        jitter = JITTER_SCALE * float(np.trace(precision)) / size
        logger.debug("Cholesky failed; retrying with jitter %.3e.", jitter)
        try:
            return linalg.cholesky(precision + jitter * np.eye(size), lower=True)
        except linalg.LinAlgError as exc:
            raise ConditioningError("coefficient posterior precision is not positive definite") from exc


def beta_posterior(
    design: np.ndarray, ys: np.ndarray, sigma2: float, phi: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    β | rest ~ N(Σ⁻¹ Φᵀy/σ², Σ⁻¹)、Σ = ΦᵀΦ/σ² + I/φ²。

    Returns:
        (事後平均, Σ の下三角コレスキー因子)
    """
    size = design.shape[1]
    precision = design.T @ design / sigma2 + np.eye(size) / phi**2
    lower = _factorize(precision)
    mean = linalg.cho_solve((lower, True), design.T @ ys / sigma2)
    return mean, lower


def gibbs_beta_joint(
    state: LabsState,
    data: Dataset,
    sch: Schedule,
    rng: np.random.Generator,
    *,
    design: np.ndarray | None = None,
) -> LabsState:
    """全係数を条件付き正規事後から同時に引き直す。J_total = 0 なら状態をそのまま返す。"""
    if state.J_total == 0:
        return state
    if design is None:
        design = design_matrix(data.xs, state.all_atoms())
    mean, lower = beta_posterior(design, data.ys, state.sigma2, sch.phi_n)
    noise = rng.standard_normal(mean.size)
    draw = mean + linalg.solve_triangular(lower.T, noise, lower=False)
    if not np.all(np.isfinite(draw)):
        raise ConditioningError("coefficient draw is not finite")
    return state.with_coefficients(draw)


def sigma2_prior_moments(r: float, R: float) -> tuple[float, float]:
    """Inv-Gam(r/2, rR/2) の平均と分散（存在しなければ inf）。"""
    shape, scale = r / 2.0, r * R / 2.0
    mean = scale / (shape - 1.0) if shape > 1 else math.inf
    var = scale**2 / ((shape - 1.0) ** 2 * (shape - 2.0)) if shape > 2 else math.inf
    return mean, var
