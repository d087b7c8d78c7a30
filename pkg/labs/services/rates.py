from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.stats import linregress

from labs.core.errors import LabsError

MIN_RATE_POINTS = 3


class RateFitError(LabsError, ValueError):
    """傾きを推定するには点が足りない、または MSE が正でないとき。"""


def rate_fit(ns: Sequence[int], median_mses: Sequence[float]) -> tuple[float, float]:
    """log(median MSE) を log n に最小二乗回帰した (傾き, 切片)。"""
    if len(ns) != len(median_mses):
        raise RateFitError("ns and median_mses must have equal lengths")
    if len(set(ns)) < MIN_RATE_POINTS:
        raise RateFitError(f"rate_fit needs at least {MIN_RATE_POINTS} distinct n values, got {len(set(ns))}")
    mses = np.asarray(median_mses, dtype=float)
    if np.any(~(mses > 0)):
        raise RateFitError("median MSEs must be positive")
    fit = linregress(np.log(np.asarray(ns, dtype=float)), np.log(mses))
    return float(fit.slope), float(fit.intercept)
