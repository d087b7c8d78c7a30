from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor

from celery import Task

from labs.core.settings import get_settings
from labs.schemas.config import ChainConfig, HyperParams
from labs.schemas.results import BenchCell, BenchRecord
from labs.services.cells import run_cell

from .celery_app import celery_app

logger = logging.getLogger(__name__)


@celery_app.task(bind=True, name="labs.workers.run_benchmark_cell")
def run_benchmark_cell(
    self: Task,
    *,
    cell: dict,
    hyper: dict,
    chain: dict,
    standardization: str = "truth",
    grid_size: int = 2**14,
) -> dict:
    """
    ベンチマークの1セルを実行し、BenchRecord を JSON 互換の dict で返す。

    Args:
        cell: BenchCell の dict
        hyper: HyperParams の dict
        chain: ChainConfig の dict
    """
    bench_cell = BenchCell.model_validate(cell)
    logger.debug("Task %s running cell %s", self.request.id, bench_cell)
    record = run_cell(
        bench_cell,
        HyperParams.model_validate(hyper),
        ChainConfig.model_validate(chain),
        standardization=standardization,
        grid_size=grid_size,
    )
    return record.model_dump(mode="json")


def dispatch_cells(
    cells: Sequence[BenchCell],
    hyper: HyperParams,
    chain: ChainConfig,
    *,
    standardization: str = "truth",
    grid_size: int = 2**14,
    concurrency: int | None = None,
) -> Iterator[BenchRecord]:
    """
    セルを投入し、セル順にレコードを返す。

    eager 設定では最大 concurrency 個のセルをスレッドで同時に実行する（既定は CELERY_WORKER_CONCURRENCY）。
    それ以外は全セルを先に投入してから順に待ち、同時実行数はワーカー側の設定に従う。
    """
    payload = {
        "hyper": hyper.model_dump(mode="json"),
        "chain": chain.model_dump(mode="json"),
        "standardization": standardization,
        "grid_size": grid_size,
    }

    def submit(cell: BenchCell):
        return run_benchmark_cell.apply_async(kwargs={"cell": cell.model_dump(mode="json"), **payload})

    if celery_app.conf.task_always_eager:
        workers = concurrency if concurrency is not None else get_settings().celery.worker_concurrency
        if workers < 1:
            raise ValueError(f"concurrency must be >= 1, got {workers}")
        if workers == 1:
            for cell in cells:
                yield BenchRecord.model_validate(submit(cell).get())
            return
        logger.info("Running %s benchmark cells eagerly with %s threads", len(cells), workers)
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="labs-cell") as pool:
            futures = [pool.submit(lambda c=cell: submit(c).get()) for cell in cells]
            for future in futures:
                yield BenchRecord.model_validate(future.result())
        return

    pending = [submit(cell) for cell in cells]
    logger.info("Submitted %s benchmark cells to queue %s", len(pending), celery_app.conf.task_default_queue)
    for result in pending:
        yield BenchRecord.model_validate(result.get())
