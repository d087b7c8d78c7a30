from __future__ import annotations

import hashlib
import logging
import math
import time

import numpy as np

from labs.sampler.chain import posterior_mean, run_chain
from labs.schemas.config import ChainConfig, ExperimentConfig, HyperParams
from labs.schemas.results import BenchCell, BenchRecord, RecordStatus
from labs.testbed.baseline import regressogram
from labs.testbed.data import generate_dataset, mse

logger = logging.getLogger(__name__)


def derive_subseed(master: int, function: str, n: int, rsnr: float, replicate: int) -> int:
    """(master, function, n, rsnr, replicate) だけで決まる64bitのサブシード。"""
    key = f"{master}:{function}:{n}:{float(rsnr)!r}:{replicate}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def iter_cells(cfg: ExperimentConfig) -> list[BenchCell]:
    """関数 × n × RSNR × 反復 の順にセルを並べる。"""
    cells = []
    for function in cfg.functions:
        for n in cfg.ns:
            for rsnr in cfg.rsnrs:
                for replicate in range(cfg.replicates):
                    cells.append(
                        BenchCell(
                            function=function.value,
                            n=n,
                            rsnr=rsnr,
                            replicate=replicate,
                            seed=derive_subseed(cfg.seed, function.value, n, rsnr, replicate),
                        )
                    )
    return cells


def run_cell(
    cell: BenchCell,
    hyper: HyperParams,
    chain: ChainConfig,
    *,
    standardization: str = "truth",
    grid_size: int = 2**14,
) -> BenchRecord:
    """
    1セル分のデータ生成・チェーン実行・MSE計算を行い、レコードを1件返す。

    失敗しても例外は投げず status=failed のレコードにする。
    """
    started = time.perf_counter()
    try:
        data = generate_dataset(
            cell.function, cell.n, cell.rsnr, cell.seed, standardization=standardization, grid_size=grid_size
        )
        output = run_chain(data, hyper, chain.model_copy(update={"seed": cell.seed}))
        fitted = posterior_mean(output, data.xs)
        cell_mse = mse(data.truth, fitted)
        baseline_mse = mse(data.truth, regressogram(data.xs, data.ys)(data.xs))
        sigma_hat = float(np.mean(np.sqrt(output.sigma2_draws())))
        mean_j_total = float(np.mean(output.J_total_draws()))
    except Exception as exc:
        logger.exception(
            "Benchmark cell failed: function=%s n=%s rsnr=%s replicate=%s",
            cell.function,
            cell.n,
            cell.rsnr,
            cell.replicate,
        )
        return BenchRecord(
            function=cell.function,
            n=cell.n,
            rsnr=cell.rsnr,
            replicate=cell.replicate,
            seed=cell.seed,
            wall_seconds=time.perf_counter() - started,
            status=RecordStatus.failed,
            error=f"{type(exc).__name__}: {exc}",
        )

    wall_seconds = time.perf_counter() - started
    logger.info(
        "Cell done: function=%s n=%s rsnr=%s replicate=%s mse=%.4g (%.1fs)",
        cell.function,
        cell.n,
        cell.rsnr,
        cell.replicate,
        cell_mse,
        wall_seconds,
    )
    return BenchRecord(
        function=cell.function,
        n=cell.n,
        rsnr=cell.rsnr,
        replicate=cell.replicate,
        mse=cell_mse,
        log_mse=math.log(cell_mse) if cell_mse > 0 else None,
        sigma_hat=sigma_hat,
        mean_J_total=mean_j_total,
        wall_seconds=wall_seconds,
        seed=cell.seed,
        baseline_mse=baseline_mse,
    )
