from __future__ import annotations

import math

import numpy as np

from labs.testbed.data import Dataset

from .state import LabsState


def residuals(state: LabsState, data: Dataset) -> np.ndarray:
    return data.ys - state.function_values(data.xs)


def gaussian_log_likelihood(rss: float, n: int, sigma2: float) -> float:
    """残差平方和から Σ log N(y_i; f(x_i), σ²) を求める。"""
    if n == 0:
        return 0.0
    return -0.5 * n * math.log(2.0 * math.pi * sigma2) - rss / (2.0 * sigma2)


def log_likelihood(state: LabsState, data: Dataset) -> float:
    """y_i | x_i ~ N(f(x_i), σ²) の対数尤度。観測0件なら0。"""
    if state.sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if data.n == 0:
        return 0.0
    resid = residuals(state, data)
    return gaussian_log_likelihood(float(resid @ resid), data.n, state.sigma2)
