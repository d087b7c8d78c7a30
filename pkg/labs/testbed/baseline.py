from __future__ import annotations

from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike

from labs.core.errors import ensure_same_length

DEFAULT_BINS = 16


def regressogram(xs: ArrayLike, ys: ArrayLike, bins: int = DEFAULT_BINS) -> Callable[[ArrayLike], np.ndarray]:
    """
    [0, 1] を等幅 bins 個に分け、各ビンの y の平均を返す区分定数推定。

    空のビンは全体平均で埋める。戻り値は配列を受け取り予測値を返す関数。
    """
    if bins < 1:
        raise ValueError("bins must be at least 1")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    ensure_same_length(x, y, what="xs and ys")
    if x.size == 0:
        raise ValueError("regressogram needs at least one observation")

    index = np.clip(np.floor(x * bins).astype(int), 0, bins - 1)
    sums = np.bincount(index, weights=y, minlength=bins)
    counts = np.bincount(index, minlength=bins)
    levels = np.full(bins, float(np.mean(y)))
    filled = counts > 0
    levels[filled] = sums[filled] / counts[filled]

    def predict(grid: ArrayLike) -> np.ndarray:
        g = np.asarray(grid, dtype=float)
        return levels[np.clip(np.floor(g * bins).astype(int), 0, bins - 1)]

    return predict
