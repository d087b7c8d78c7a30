from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from labs.core.errors import ConfigError
from labs.splines.basis import SplineAtom, function_values


@dataclass(frozen=True)
class LabsState:
    """
    事後サンプラの状態。次数 k ごとの atom 列、Poisson 平均 M_k、誤差分散 σ² を持つ。

    更新はすべて新しいインスタンスを返す（copy-on-write）。
    """

    atoms: Mapping[int, tuple[SplineAtom, ...]]
    M: Mapping[int, float]
    sigma2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", {int(k): tuple(v) for k, v in self.atoms.items()})
        object.__setattr__(self, "M", {int(k): float(v) for k, v in self.M.items()})
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @classmethod
    def empty(cls, degrees: list[int], M: Mapping[int, float], sigma2: float) -> LabsState:
        return cls(atoms={k: () for k in degrees}, M=dict(M), sigma2=sigma2)

    @property
    def degrees(self) -> list[int]:
        return sorted(set(self.atoms) | set(self.M))

    def count(self, degree: int) -> int:
        return len(self.atoms.get(degree, ()))

    @property
    def J_total(self) -> int:
        return sum(len(v) for v in self.atoms.values())

    def iter_atoms(self) -> Iterator[tuple[int, int, SplineAtom]]:
        """(degree, index, atom) を次数昇順・添字順に列挙する。"""
        for k in sorted(self.atoms):
            for index, atom in enumerate(self.atoms[k]):
                yield k, index, atom

    def all_atoms(self) -> list[SplineAtom]:
        return [atom for _, _, atom in self.iter_atoms()]

    def coefficients(self) -> np.ndarray:
        return np.array([atom.coefficient for atom in self.all_atoms()], dtype=float)

    def function_values(self, xs: ArrayLike) -> np.ndarray:
        return function_values(self.all_atoms(), xs)

    # --- copy-on-write helpers ---

    def with_sigma2(self, sigma2: float) -> LabsState:
        return LabsState(atoms=self.atoms, M=self.M, sigma2=sigma2)

    def with_M(self, degree: int, value: float) -> LabsState:
        return LabsState(atoms=self.atoms, M={**self.M, degree: value}, sigma2=self.sigma2)

    def with_atoms(self, degree: int, atoms: tuple[SplineAtom, ...]) -> LabsState:
        return LabsState(atoms={**self.atoms, degree: tuple(atoms)}, M=self.M, sigma2=self.sigma2)

    def add_atom(self, degree: int, atom: SplineAtom) -> LabsState:
        return self.with_atoms(degree, (*self.atoms.get(degree, ()), atom))

    def remove_atom(self, degree: int, index: int) -> LabsState:
        atoms = list(self.atoms[degree])
        del atoms[index]
        return self.with_atoms(degree, tuple(atoms))

    def replace_atom(self, degree: int, index: int, atom: SplineAtom) -> LabsState:
        atoms = list(self.atoms[degree])
        atoms[index] = atom
        return self.with_atoms(degree, tuple(atoms))

    def with_coefficients(self, coefficients: ArrayLike) -> LabsState:
        """all_atoms() の順に並んだ係数ベクトルで全 atom の β を置き換える。"""
        values = np.asarray(coefficients, dtype=float)
        if values.size != self.J_total:
            raise ValueError(f"expected {self.J_total} coefficients, got {values.size}")
        atoms: dict[int, tuple[SplineAtom, ...]] = {}
        position = 0
        for k in sorted(self.atoms):
            current = self.atoms[k]
            atoms[k] = tuple(
                atom.with_coefficient(values[position + i]) for i, atom in enumerate(current)
            )
            position += len(current)
        return LabsState(atoms=atoms, M=self.M, sigma2=self.sigma2)


@dataclass(frozen=True)
class TruthSpec:
    """真の回帰関数 f₀ と誤差 σ₀、clip 水準 F と想定する Besov クラス (s, p, q)。"""

    f0: Callable[[np.ndarray], np.ndarray]
    sigma0: float
    F: float
    s: float = 1.0
    p: float = 1.0
    q: float = math.inf
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.sigma0 > 0:
            raise ConfigError("sigma0 must be positive")
        if not self.F > 0:
            raise ConfigError("clip level F must be positive")
        if not (self.s > 0 and self.p > 0 and self.q > 0):
            raise ConfigError("Besov parameters s, p, q must be positive")
