from __future__ import annotations

import logging
from pathlib import Path

from labs.core.settings import AppSettings, get_settings
from labs.schemas.config import ExperimentConfig
from labs.schemas.results import BenchRecord
from labs.workers import tasks as worker_tasks

from .cells import iter_cells
from .results import ResultWriter

logger = logging.getLogger(__name__)


def resolve_output_dir(cfg: ExperimentConfig, settings: AppSettings | None = None) -> Path:
    """設定ファイルの output_dir、無ければ LABS_OUTPUT_DIR。"""
    if cfg.output_dir:
        return Path(cfg.output_dir).expanduser()
    return (settings or get_settings()).run.output_path


def run_benchmark(
    cfg: ExperimentConfig,
    *,
    writer: ResultWriter | None = None,
    settings: AppSettings | None = None,
) -> list[BenchRecord]:
    """
    全セルを実行してレコードを返す。writer があれば到着順に追記する。

    セルの失敗はレコードの status に残り、スイープは止めない。
    """
    app_settings = settings or get_settings()
    cells = iter_cells(cfg)
    logger.info(
        "Running benchmark: %s cells (functions=%s ns=%s rsnrs=%s replicates=%s)",
        len(cells),
        [f.value for f in cfg.functions],
        cfg.ns,
        cfg.rsnrs,
        cfg.replicates,
    )
    records = []
    for record in worker_tasks.dispatch_cells(
        cells,
        cfg.hyper,
        cfg.chain,
        standardization=cfg.standardization.value,
        grid_size=app_settings.run.standardization_grid,
        concurrency=app_settings.celery.worker_concurrency,
    ):
        records.append(record)
        if writer is not None:
            writer.append(record)
    failed = sum(record.failed for record in records)
    if failed:
        logger.warning("Benchmark finished with %s failed cells out of %s", failed, len(records))
    return records
