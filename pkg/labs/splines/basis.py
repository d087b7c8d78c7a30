from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from labs.core.errors import LabsError

MAX_DEGREE = 10


class InvalidKnotsError(LabsError, ValueError):
    """ノット列が B-spline の定義を満たさないとき。"""


class NoBasisError(LabsError, ValueError):
    """基底が1本も無い状態で計画行列を作ろうとしたとき。"""


@dataclass(frozen=True, slots=True)
class KnotVector:
    """次数 k の B-spline を決める k+2 個の非減少ノット列。"""

    degree: int
    knots: tuple[float, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.degree <= MAX_DEGREE:
            raise InvalidKnotsError(f"degree must be in [0, {MAX_DEGREE}], got {self.degree}")
        knots = tuple(float(v) for v in self.knots)
        if len(knots) != self.degree + 2:
            raise InvalidKnotsError(f"degree {self.degree} needs {self.degree + 2} knots, got {len(knots)}")
        if not all(math.isfinite(v) for v in knots):
            raise InvalidKnotsError("knots must be finite")
        if any(b < a for a, b in zip(knots, knots[1:], strict=False)):
            raise InvalidKnotsError(f"knots must be nondecreasing: {knots}")
        object.__setattr__(self, "knots", knots)

    @classmethod
    def from_sequence(cls, knots: Iterable[float]) -> KnotVector:
        values = tuple(float(v) for v in knots)
        return cls(degree=len(values) - 2, knots=values)

    @property
    def left(self) -> float:
        return self.knots[0]

    @property
    def right(self) -> float:
        return self.knots[-1]

    @property
    def min_spacing(self) -> float:
        return min_spacing(self.knots)

    def replace_knot(self, index: int, value: float) -> KnotVector:
        knots = list(self.knots)
        knots[index] = value
        return KnotVector(degree=self.degree, knots=tuple(knots))


@dataclass(frozen=True, slots=True)
class SplineAtom:
    """係数付きの B-spline 基底1本（β·B_k(·; ξ)）。"""

    knotvec: KnotVector
    coefficient: float

    def __post_init__(self) -> None:
        coefficient = float(self.coefficient)
        if not math.isfinite(coefficient):
            raise InvalidKnotsError(f"atom coefficient must be finite, got {self.coefficient}")
        object.__setattr__(self, "coefficient", coefficient)

    @property
    def degree(self) -> int:
        return self.knotvec.degree

    def with_coefficient(self, coefficient: float) -> SplineAtom:
        return SplineAtom(knotvec=self.knotvec, coefficient=coefficient)

    def with_knots(self, knotvec: KnotVector) -> SplineAtom:
        return SplineAtom(knotvec=knotvec, coefficient=self.coefficient)


def bspline_basis(xs: ArrayLike, kv: KnotVector) -> np.ndarray:
    """
    Cox–de Boor 漸化式で B_k(x; ξ) を配列 xs 上で一括評価する。

    次数0は半開区間の指示関数 1[ξ_j <= x < ξ_{j+1}]。分母が0になる項は0とみなす。
    """
    x = np.asarray(xs, dtype=float)
    t = np.asarray(kv.knots, dtype=float)
    k = kv.degree

    # 次数0: k+1 個の区間指示関数
    values = ((t[:-1, None] <= x) & (x < t[1:, None])).astype(float)
    for d in range(1, k + 1):
        span_left = t[d : k + 1] - t[: k + 1 - d]
        span_right = t[d + 1 : k + 2] - t[1 : k + 2 - d]
        with np.errstate(divide="ignore", invalid="ignore"):
            w_left = np.where(span_left[:, None] > 0, (x - t[: k + 1 - d, None]) / span_left[:, None], 0.0)
            w_right = np.where(span_right[:, None] > 0, (t[d + 1 : k + 2, None] - x) / span_right[:, None], 0.0)
        values = w_left * values[:-1] + w_right * values[1:]
    return values[0]


def bspline_eval(x: float, kv: KnotVector) -> float:
    return float(bspline_basis(np.array([x]), kv)[0])


def function_values(atoms: Sequence[SplineAtom], xs: ArrayLike) -> np.ndarray:
    """Σ β·B_k(x; ξ) を xs 上で評価する。atoms が空なら0。"""
    x = np.asarray(xs, dtype=float)
    total = np.zeros_like(x, dtype=float)
    for atom in atoms:
        total += atom.coefficient * bspline_basis(x, atom.knotvec)
    return total


def function_eval(atoms: Sequence[SplineAtom], x: float) -> float:
    return float(function_values(atoms, np.array([x]))[0])


def design_matrix(xs: ArrayLike, atoms: Sequence[SplineAtom]) -> np.ndarray:
    """(i, j) 成分が atom j の基底の x_i での値（係数は掛けない）の n×J 行列。"""
    if not atoms:
        raise NoBasisError("design_matrix requires at least one atom")
    x = np.asarray(xs, dtype=float)
    return np.column_stack([bspline_basis(x, atom.knotvec) for atom in atoms]).reshape(x.size, len(atoms))


def min_spacing(knots: Sequence[float]) -> float:
    """ソート済みノットの隣接間隔の最小値。重複ノットがあれば0。"""
    values = np.sort(np.asarray(knots, dtype=float))
    if values.size < 2:
        raise InvalidKnotsError("min_spacing needs at least two knots")
    return float(np.min(np.diff(values)))
