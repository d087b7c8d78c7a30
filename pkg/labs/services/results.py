from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from labs.core.errors import LabsError
from labs.schemas.results import RESULT_COLUMNS, BenchRecord, CellSummary, RateRecord

from .rates import RateFitError, rate_fit

logger = logging.getLogger(__name__)

RESULTS_FILE = "results.csv"
FAILURES_FILE = "failures.csv"
SUMMARY_FILE = "summary.json"
RATES_FILE = "rates.csv"

FAILURE_COLUMNS = ("function", "n", "rsnr", "replicate", "seed", "wall_seconds", "error")
RATE_COLUMNS = ("function", "rsnr", "slope", "intercept", "points")


class ResultWriteError(LabsError, RuntimeError):
    """結果ディレクトリにファイルを書き出せない場合に送出される。"""


def _format(value: object) -> object:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


class ResultWriter:
    """
    ベンチマーク結果の唯一の書き手。

    レコードは到着順に results.csv（失敗は failures.csv）へ追記し、
    finalize で summary.json と rates.csv を書く。
    """

    def __init__(self, base_directory: Path) -> None:
        self.base_directory = Path(base_directory)
        try:
            self.base_directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ResultWriteError(f"Cannot create result directory {self.base_directory}: {exc}") from exc
        self._records: list[BenchRecord] = []
        self._start_file(RESULTS_FILE, RESULT_COLUMNS)
        self._start_file(FAILURES_FILE, FAILURE_COLUMNS)

    @property
    def records(self) -> list[BenchRecord]:
        return list(self._records)

    def path(self, name: str) -> Path:
        return _safe_join(self.base_directory, name)

    def _start_file(self, name: str, header: Sequence[str]) -> None:
        self._write_rows(name, [header], mode="w")

    def _write_rows(self, name: str, rows: Iterable[Sequence[object]], *, mode: str = "a") -> None:
        target = self.path(name)
        try:
            with target.open(mode, newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                for row in rows:
                    writer.writerow([_format(value) for value in row])
        except OSError as exc:
            logger.exception("Failed to write %s", target)
            raise ResultWriteError(f"Failed to write {target}: {exc}") from exc

    def append(self, record: BenchRecord) -> None:
        self._records.append(record)
        if record.failed:
            self._write_rows(FAILURES_FILE, [[getattr(record, column) for column in FAILURE_COLUMNS]])
        else:
            self._write_rows(RESULTS_FILE, [[getattr(record, column) for column in RESULT_COLUMNS]])

    def finalize(self) -> list[Path]:
        cells = summarize_records(self._records)
        rates = rate_records(cells)
        summary_path = self.path(SUMMARY_FILE)
        payload = {"cells": [cell.model_dump(mode="json") for cell in cells]}
        try:
            summary_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        except OSError as exc:
            logger.exception("Failed to write %s", summary_path)
            raise ResultWriteError(f"Failed to write {summary_path}: {exc}") from exc
        self._start_file(RATES_FILE, RATE_COLUMNS)
        self._write_rows(RATES_FILE, [[getattr(rate, column) for column in RATE_COLUMNS] for rate in rates])
        logger.info("Wrote %s records to %s", len(self._records), self.base_directory)
        return [self.path(name) for name in (RESULTS_FILE, FAILURES_FILE, SUMMARY_FILE, RATES_FILE)]


def _safe_join(base_directory: Path, name: str) -> Path:
    """base_directory の外へ書き出されるのを防ぐ。"""
    full_path = base_directory.joinpath(name).resolve()
    if not full_path.is_relative_to(base_directory.resolve()):
        raise ResultWriteError("Attempted to write outside of the result directory.")
    return full_path


def _median_or_none(values: list[float]) -> float | None:
    return float(np.median(values)) if values else None


def summarize_records(records: Sequence[BenchRecord]) -> list[CellSummary]:
    """(関数, n, RSNR) ごとに log-MSE の中央値・四分位・IQR を集計する（出現順）。"""
    groups: dict[tuple[str, int, float], list[BenchRecord]] = {}
    for record in records:
        groups.setdefault((record.function, record.n, record.rsnr), []).append(record)

    cells = []
    for (function, n, rsnr), members in groups.items():
        ok = [record for record in members if not record.failed]
        log_mses = [record.log_mse for record in ok if record.log_mse is not None]
        q1 = q3 = None
        if log_mses:
            q1, q3 = (float(v) for v in np.percentile(log_mses, [25.0, 75.0]))
        cells.append(
            CellSummary(
                function=function,
                n=n,
                rsnr=rsnr,
                count=len(ok),
                failed=len(members) - len(ok),
                median_log_mse=_median_or_none(log_mses),
                q1_log_mse=q1,
                q3_log_mse=q3,
                iqr_log_mse=None if q1 is None else q3 - q1,
                median_mse=_median_or_none([record.mse for record in ok if record.mse is not None]),
                median_baseline_mse=_median_or_none(
                    [record.baseline_mse for record in ok if record.baseline_mse is not None]
                ),
                median_sigma_hat=_median_or_none([record.sigma_hat for record in ok if record.sigma_hat is not None]),
            )
        )
    return cells


def rate_records(cells: Sequence[CellSummary]) -> list[RateRecord]:
    """関数 × RSNR ごとに median MSE の log-log 傾きを求める。点が3未満の組は飛ばす。"""
    groups: dict[tuple[str, float], list[CellSummary]] = {}
    for cell in cells:
        if cell.median_mse is not None and cell.median_mse > 0:
            groups.setdefault((cell.function, cell.rsnr), []).append(cell)

    rates = []
    for (function, rsnr), members in groups.items():
        ordered = sorted(members, key=lambda cell: cell.n)
        try:
            slope, intercept = rate_fit([cell.n for cell in ordered], [cell.median_mse for cell in ordered])
        except RateFitError as exc:
            logger.info("Skipping rate fit for %s rsnr=%s: %s", function, rsnr, exc)
            continue
        if math.isfinite(slope):
            rates.append(
                RateRecord(function=function, rsnr=rsnr, slope=slope, intercept=intercept, points=len(ordered))
            )
    return rates


def emit_results(records: Sequence[BenchRecord], output_dir: str | Path) -> list[Path]:
    """レコード列をまとめて results.csv / failures.csv / summary.json / rates.csv に書く。"""
    if not records:
        raise ValueError("emit_results needs at least one record")
    writer = ResultWriter(Path(output_dir))
    for record in records:
        writer.append(record)
    return writer.finalize()
