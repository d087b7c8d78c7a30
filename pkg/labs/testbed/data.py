from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from labs.core.errors import LabsError, ensure_same_length

from .functions import TestFunctionId, standardized_truth, truth_values

logger = logging.getLogger(__name__)

DATASET_COLUMNS = ("x", "y")


class DatasetFormatError(LabsError, ValueError):
    """データセットCSV/JSONサイドカーの形式が不正なとき。"""


@dataclass(frozen=True)
class Dataset:
    """
    ランダム計画 x_i ~ U[0,1] と応答 y_i、真の関数値と標準化情報をまとめたもの。

    truth は y と同じスケールでの f₀(x_i)。実データなど真値が無い場合は None。
    """

    xs: np.ndarray
    ys: np.ndarray
    sigma0: float | None = None
    center: float = 0.0
    scale: float = 1.0
    truth: np.ndarray | None = None
    function_id: TestFunctionId | None = None
    rsnr: float | None = None
    seed: int | None = None
    standardization: str = "truth"
    metadata: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        ensure_same_length(xs, ys, what="xs and ys")
        if not self.scale > 0:
            raise DatasetFormatError("standardization scale must be positive")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if self.truth is not None:
            truth = np.asarray(self.truth, dtype=float)
            ensure_same_length(xs, truth, what="xs and truth")
            object.__setattr__(self, "truth", truth)

    @classmethod
    def empty(cls) -> Dataset:
        """事前分布の再現テスト用の観測0件データ。"""
        return cls(xs=np.empty(0), ys=np.empty(0))

    @property
    def n(self) -> int:
        return int(self.xs.size)

    def sidecar(self) -> dict[str, object]:
        return {
            "id": self.function_id.value if self.function_id else None,
            "n": self.n,
            "rsnr": _json_float(self.rsnr),
            "sigma0": self.sigma0,
            "seed": self.seed,
            "standardization": {
                "mode": self.standardization,
                "center": self.center,
                "scale": self.scale,
            },
            **self.metadata,
        }


def _json_float(value: float | None) -> float | str | None:
    if value is not None and math.isinf(value):
        return "inf"
    return value


def dataset_generator(seed: int) -> np.random.Generator:
    """シードをキーとするカウンタベース乱数（Philox）。"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def generate_dataset(
    function_id: TestFunctionId | str,
    n: int,
    rsnr: float,
    seed: int,
    *,
    standardization: str = "truth",
    grid_size: int = 2**14,
) -> Dataset:
    """
    標準化済みテスト関数から RSNR 指定のデータを生成する。σ₀ = 1/RSNR。

    standardization="empirical" のときは y を実現値ごとに標準化し、真値も同じアフィン変換で写す。
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not rsnr > 0:
        raise ValueError("rsnr must be positive")
    fid = TestFunctionId(function_id)
    truth_fn, center, scale = standardized_truth(fid, grid_size)

    rng = dataset_generator(seed)
    xs = rng.uniform(0.0, 1.0, size=n)
    sigma0 = 0.0 if math.isinf(rsnr) else 1.0 / rsnr
    truth = truth_fn(xs)
    noise = rng.standard_normal(n)
    ys = truth + sigma0 * noise

    if standardization == "empirical":
        y_center = float(np.mean(ys))
        y_scale = float(np.std(ys)) if n > 1 else 1.0
        if not y_scale > 0:
            y_scale = 1.0
        ys = (ys - y_center) / y_scale
        truth = (truth - y_center) / y_scale
        sigma0 = sigma0 / y_scale
        center = center + scale * y_center
        scale = scale * y_scale
    elif standardization != "truth":
        raise ValueError(f"unknown standardization mode '{standardization}'")

    logger.debug("Generated %s dataset n=%s rsnr=%s seed=%s", fid.value, n, rsnr, seed)
    return Dataset(
        xs=xs,
        ys=ys,
        sigma0=sigma0,
        center=center,
        scale=scale,
        truth=truth,
        function_id=fid,
        rsnr=rsnr,
        seed=seed,
        standardization=standardization,
    )


def mse(truth_vals: ArrayLike, fitted_vals: ArrayLike) -> float:
    """n⁻¹ Σ (f₀(x_i) − f̂(x_i))²。"""
    truth = np.asarray(truth_vals, dtype=float)
    fitted = np.asarray(fitted_vals, dtype=float)
    ensure_same_length(truth, fitted, what="truth and fitted values")
    if truth.size == 0:
        raise ValueError("mse needs at least one value")
    return float(np.mean((truth - fitted) ** 2))


def root_snr(values: ArrayLike, sigma: float) -> float:
    """グリッド上の関数値から RSNR = sqrt(∫(f − f̄)² / σ²) を求める。"""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return float(np.std(np.asarray(values, dtype=float)) / sigma)


# --- CSV + JSON サイドカー ---


def write_dataset(dataset: Dataset, path: str | Path) -> Path:
    """(x, y) の2列CSVと同名 .json のサイドカーを書き出す。"""
    csv_path = Path(path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(DATASET_COLUMNS)
        for x, y in zip(dataset.xs, dataset.ys, strict=True):
            writer.writerow((repr(float(x)), repr(float(y))))
    sidecar_path = csv_path.with_suffix(".json")
    sidecar_path.write_text(json.dumps(dataset.sidecar(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path


def read_dataset(path: str | Path) -> Dataset:
    """write_dataset の出力を読み戻す。サイドカーがあれば真値も復元する。"""
    csv_path = Path(path)
    try:
        with csv_path.open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or tuple(reader.fieldnames[:2]) != DATASET_COLUMNS:
                raise DatasetFormatError(f"{csv_path} must start with columns x,y")
            rows = [(float(row["x"]), float(row["y"])) for row in reader]
    except ValueError as exc:
        if isinstance(exc, DatasetFormatError):
            raise
        raise DatasetFormatError(f"{csv_path} contains non-numeric values") from exc

    xs = np.array([x for x, _ in rows], dtype=float)
    ys = np.array([y for _, y in rows], dtype=float)

    sidecar_path = csv_path.with_suffix(".json")
    if not sidecar_path.exists():
        return Dataset(xs=xs, ys=ys)

    try:
        meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"invalid sidecar {sidecar_path}") from exc

    standardization = meta.get("standardization") or {}
    function_id = TestFunctionId(meta["id"]) if meta.get("id") else None
    center = float(standardization.get("center", 0.0))
    scale = float(standardization.get("scale", 1.0))
    truth = None
    if function_id is not None and xs.size and np.all((xs >= 0.0) & (xs <= 1.0)):
        truth = (truth_values(function_id, xs) - center) / scale

    rsnr = meta.get("rsnr")
    return Dataset(
        xs=xs,
        ys=ys,
        sigma0=meta.get("sigma0"),
        center=center,
        scale=scale,
        truth=truth,
        function_id=function_id,
        rsnr=float(rsnr) if rsnr is not None else None,
        seed=meta.get("seed"),
        standardization=str(standardization.get("mode", "truth")),
    )
