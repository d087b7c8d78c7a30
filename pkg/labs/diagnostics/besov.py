from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import trapezoid
from scipy.special import comb
from scipy.stats import linregress

from labs.core.errors import LabsError

logger = logging.getLogger(__name__)

DEFAULT_T_POINTS = 48


class GridAlignmentError(LabsError, ValueError):
    """差分の刻み h がグリッド間隔の正の整数倍でないとき。"""


@dataclass(frozen=True, eq=False)
class GridFunction:
    """[0, 1] の等間隔グリッド（両端を含む）上の関数値。"""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("GridFunction needs at least two values")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray], grid_size: int) -> GridFunction:
        return cls(values=np.asarray(func(np.linspace(0.0, 1.0, grid_size)), dtype=float))

    @property
    def grid_size(self) -> int:
        return int(self.values.size)

    @property
    def step(self) -> float:
        return 1.0 / (self.grid_size - 1)

    @property
    def h_min(self) -> float:
        return 4.0 / self.grid_size

    @cached_property
    def _norm_cache(self) -> dict[tuple[int, float], np.ndarray]:
        return {}


def _grid_multiple(g: GridFunction, h: float) -> int:
    if not h > 0:
        raise GridAlignmentError(f"step h must be positive, got {h}")
    multiple = round(h / g.step)
    if multiple < 1 or not math.isclose(multiple * g.step, h, rel_tol=1e-9, abs_tol=1e-12):
        raise GridAlignmentError(f"h={h} is not a multiple of the grid step {g.step}")
    return multiple


def _difference_on_support(values: np.ndarray, r: int, multiple: int) -> np.ndarray:
    """支持 [0, 1 − rh] 上の Δ_h^r f の値（長さ N − r·m）。"""
    count = values.size - r * multiple
    total = np.zeros(count)
    for j in range(r + 1):
        total += comb(r, j, exact=True) * (-1) ** (r - j) * values[j * multiple : j * multiple + count]
    return total


def finite_difference(g: GridFunction, r: int, h: float) -> GridFunction:
    """
    r 階差分 Δ_h^r f(x) = Σ_k C(r,k)(−1)^{r−k} f(x + kh)。

    [0, 1 − rh] の外では 0 とする。
    """
    if r < 1:
        raise ValueError("difference order r must be at least 1")
    multiple = _grid_multiple(g, h)
    if r * multiple > g.grid_size - 1:
        raise GridAlignmentError(f"r*h = {r * h} exceeds 1")
    values = np.zeros(g.grid_size)
    support = _difference_on_support(g.values, r, multiple)
    values[: support.size] = support
    return GridFunction(values=values)


def _support_norm(diff: np.ndarray, step: float, p: float) -> float:
    """左端点リーマン和による支持上の離散 L^p ノルム（p = inf は最大値）。"""
    if math.isinf(p):
        return float(np.max(np.abs(diff)))
    intervals = diff[:-1]
    if intervals.size == 0:
        return 0.0
    return float((step * np.sum(np.abs(intervals) ** p)) ** (1.0 / p))


def lp_norm(g: GridFunction, p: float) -> float:
    return _support_norm(g.values, g.step, p)


def _difference_norms(g: GridFunction, r: int, p: float) -> np.ndarray:
    """m = 1..⌊(N−1)/r⌋ の各刻み m·step での ‖Δ^r f‖_p。"""
    key = (r, float(p))
    cache = g._norm_cache
    if key not in cache:
        largest = (g.grid_size - 1) // r
        logger.debug("Computing %s difference norms (r=%s, p=%s, grid_size=%s).", largest, r, p, g.grid_size)
        cache[key] = np.array(
            [_support_norm(_difference_on_support(g.values, r, m), g.step, p) for m in range(1, largest + 1)]
        )
    return cache[key]


def modulus_of_smoothness(g: GridFunction, r: int, p: float, t: float) -> float:
    """w_{r,p}(f, t): グリッドに乗る h ∈ (0, t] での ‖Δ_h^r f‖_p の最大値。"""
    if not t > 0:
        raise ValueError("t must be positive")
    if r < 1:
        raise ValueError("difference order r must be at least 1")
    norms = _difference_norms(g, r, p)
    reachable = min(int(math.floor(t / g.step + 1e-9)), norms.size)
    if reachable < 1:
        return 0.0
    return float(np.max(norms[:reachable]))


def default_t_grid(g: GridFunction, points: int = DEFAULT_T_POINTS) -> np.ndarray:
    """h_min = 4/grid_size から 1 までの対数等間隔。"""
    return np.geomspace(g.h_min, 1.0, points)


def besov_profile(g: GridFunction, s: float, p: float, t_grid: ArrayLike | None = None) -> np.ndarray:
    """列 (t, w_{r,p}(f,t), t^{−s} w) の配列。r = ⌊s⌋ + 1。"""
    r = int(math.floor(s)) + 1
    ts = default_t_grid(g) if t_grid is None else np.asarray(t_grid, dtype=float)
    moduli = np.array([modulus_of_smoothness(g, r, p, t) for t in ts])
    return np.column_stack([ts, moduli, ts ** (-s) * moduli])


def besov_seminorm_estimate(
    g: GridFunction, s: float, p: float, q: float, t_grid: ArrayLike | None = None
) -> float:
    """
    Besov 半ノルムの離散推定。q = inf なら max_t t^{−s} w、
    q < inf なら ∫ (t^{−s} w)^q dt/t を log t 上の台形則で近似して 1/q 乗する。
    """
    if not (s > 0 and p > 0 and q > 0):
        raise ValueError("s, p and q must be positive")
    profile = besov_profile(g, s, p, t_grid)
    scaled = profile[:, 2]
    if math.isinf(q):
        return float(np.max(scaled))
    integral = trapezoid(scaled**q, np.log(profile[:, 0]))
    return float(integral ** (1.0 / q))


def besov_norm_estimate(
    g: GridFunction, s: float, p: float, q: float, t_grid: ArrayLike | None = None
) -> float:
    """‖f‖_p + |f|_{B^s_{p,q}} の離散推定。"""
    return lp_norm(g, p) + besov_seminorm_estimate(g, s, p, q, t_grid)


def empirical_slope(profile: ArrayLike) -> float:
    """besov_profile の log w を log t に回帰した傾き（w = 0 の行は除く）。"""
    rows = np.asarray(profile, dtype=float)
    usable = rows[rows[:, 1] > 0]
    if usable.shape[0] < 2:
        raise ValueError("need at least two scales with positive modulus")
    fit = linregress(np.log(usable[:, 0]), np.log(usable[:, 1]))
    return float(fit.slope)
