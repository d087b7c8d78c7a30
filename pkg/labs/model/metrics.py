from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from labs.core.errors import ensure_same_length


def clip(F: float, x: float | ArrayLike) -> float | np.ndarray:
    """clip_F(x) = min(F, max(−F, x))。配列にも要素ごとに作用する。"""
    if not F > 0:
        raise ValueError("clip level F must be positive")
    if np.ndim(x) == 0:
        return float(min(F, max(-F, float(x))))
    return np.clip(np.asarray(x, dtype=float), -F, F)


def hellinger_squared(mu1: ArrayLike, sigma1: float, mu2: ArrayLike, sigma2: float) -> np.ndarray:
    """正規分布 N(μ1, σ1²) と N(μ2, σ2²) の Hellinger 距離の2乗（閉形式）。"""
    var_sum = sigma1**2 + sigma2**2
    diff = np.asarray(mu1, dtype=float) - np.asarray(mu2, dtype=float)
    value = 1.0 - np.sqrt(2.0 * sigma1 * sigma2 / var_sum) * np.exp(-(diff**2) / (4.0 * var_sum))
    return np.maximum(value, 0.0)


def hellinger_profile(f1_vals: ArrayLike, sigma1: float, f2_vals: ArrayLike, sigma2: float) -> float:
    """計画点上の平均2乗 Hellinger 距離の平方根 d_{n,H}。σ は分散ではなく標準偏差で渡す。"""
    first = np.asarray(f1_vals, dtype=float)
    second = np.asarray(f2_vals, dtype=float)
    ensure_same_length(first, second, what="function values")
    if not (sigma1 > 0 and sigma2 > 0):
        raise ValueError("standard deviations must be positive")
    if first.size == 0:
        raise ValueError("hellinger_profile needs at least one design point")
    return float(np.sqrt(np.mean(hellinger_squared(first, sigma1, second, sigma2))))
