from __future__ import annotations

import math
from collections.abc import Callable
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike

from labs.core.errors import LabsError

# Donoho–Johnstone の係数（Blocks/Bumps 共通の位置 t_j）
JUMP_LOCATIONS = (0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81)
BLOCKS_HEIGHTS = (4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2)
BUMPS_HEIGHTS = (4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 2.1, 4.2)
BUMPS_WIDTHS = (0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005)

RealFunction = Callable[[np.ndarray], np.ndarray]


class DomainError(LabsError, ValueError):
    """テスト関数が [0, 1] の外で評価されたとき。"""


class ZeroScaleError(LabsError, ValueError):
    """定数関数を標準化しようとしたとき。"""


class TestFunctionId(str, Enum):
    blocks = "blocks"
    bumps = "bumps"
    heavisine = "heavisine"
    doppler = "doppler"

    # pytest がテストクラスとして収集しないように
    __test__ = False


def _blocks(x: np.ndarray) -> np.ndarray:
    total = np.zeros_like(x)
    for t_j, h_j in zip(JUMP_LOCATIONS, BLOCKS_HEIGHTS, strict=True):
        total += h_j * (1.0 + np.sign(x - t_j)) / 2.0
    return total


def _bumps(x: np.ndarray) -> np.ndarray:
    total = np.zeros_like(x)
    for t_j, h_j, w_j in zip(JUMP_LOCATIONS, BUMPS_HEIGHTS, BUMPS_WIDTHS, strict=True):
        total += h_j * (1.0 + np.abs((x - t_j) / w_j)) ** -4
    return total


def _heavisine(x: np.ndarray) -> np.ndarray:
    return 4.0 * np.sin(4.0 * math.pi * x) - np.sign(x - 0.3) - np.sign(0.72 - x)


def _doppler(x: np.ndarray) -> np.ndarray:
    return np.sqrt(x * (1.0 - x)) * np.sin(2.1 * math.pi / (x + 0.05))


_FUNCTIONS: dict[TestFunctionId, RealFunction] = {
    TestFunctionId.blocks: _blocks,
    TestFunctionId.bumps: _bumps,
    TestFunctionId.heavisine: _heavisine,
    TestFunctionId.doppler: _doppler,
}


def truth_values(function_id: TestFunctionId | str, xs: ArrayLike) -> np.ndarray:
    """テスト関数を配列上で評価する。sgn(0) = 0 とする。"""
    x = np.asarray(xs, dtype=float)
    if x.size and (np.min(x) < 0.0 or np.max(x) > 1.0 or not np.all(np.isfinite(x))):
        raise DomainError("test functions are defined on [0, 1] only")
    return _FUNCTIONS[TestFunctionId(function_id)](x)


def eval_test_function(function_id: TestFunctionId | str, x: float) -> float:
    return float(truth_values(function_id, np.array([x]))[0])


def standardize(func: RealFunction, grid_size: int) -> tuple[RealFunction, float, float]:
    """
    等間隔グリッド上の平均0・標準偏差1になるよう関数を標準化する。

    Returns:
        (標準化済み関数, center, scale)
    """
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    grid = np.linspace(0.0, 1.0, grid_size)
    values = np.asarray(func(grid), dtype=float)
    center = float(np.mean(values))
    scale = float(np.std(values))
    if not scale > 0.0:
        raise ZeroScaleError("cannot standardize a constant function")

    def standardized(xs: ArrayLike) -> np.ndarray:
        return (np.asarray(func(np.asarray(xs, dtype=float)), dtype=float) - center) / scale

    return standardized, center, scale


def standardized_truth(function_id: TestFunctionId | str, grid_size: int = 2**14) -> tuple[RealFunction, float, float]:
    """テスト関数の標準化版。RSNR = 1/σ₀ がそのまま成り立つ。"""
    fid = TestFunctionId(function_id)
    return standardize(lambda xs: truth_values(fid, xs), grid_size)
