from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from labs.schemas.results import FitSummary

from .chain import ChainOutput

logger = logging.getLogger(__name__)

DEFAULT_BATCHES = 20


def monte_carlo_se(draws: ArrayLike, batches: int = DEFAULT_BATCHES) -> float:
    """
    バッチ平均法によるモンテカルロ標準誤差。

    末尾の端数は捨て、batches 個の等長バッチ平均の標準偏差 / sqrt(batches) を返す。
    """
    values = np.asarray(draws, dtype=float)
    if batches < 2:
        raise ValueError("batches must be at least 2")
    size = values.size // batches
    if size < 1:
        raise ValueError(f"need at least {batches} draws for {batches} batches, got {values.size}")
    means = values[: size * batches].reshape(batches, size).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(batches))


def _mcse_or_none(values: np.ndarray) -> float | None:
    if values.size < 2 * DEFAULT_BATCHES:
        return None
    return monte_carlo_se(values)


def write_trace(output: ChainOutput, path: str | Path) -> Path:
    """スイープごとのトレース（J_k、σ²、対数事後密度、move と受理フラグ）をCSVに書く。"""
    trace_path = Path(path)
    trace_path.parent.mkdir(parents=True, exist_ok=True)
    degrees = output.degrees
    header = ["iteration"]
    header += [f"J_{k}" for k in degrees]
    header += ["sigma2", "log_posterior"]
    for k in degrees:
        header += [f"move_{k}", f"accepted_{k}"]
    with trace_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in output.trace:
            values: list[object] = [row.iteration]
            values += [row.counts[k] for k in degrees]
            values += [repr(row.sigma2), repr(row.log_posterior)]
            for k in degrees:
                kind, ok = row.moves[k]
                values += [kind.value, int(ok)]
            writer.writerow(values)
    logger.info("Wrote %s trace rows to %s", len(output.trace), trace_path)
    return trace_path


def summarize_chain(output: ChainOutput) -> FitSummary:
    """事後平均 σ̂、平均 J_k、受理率、MCSE をまとめる。"""
    sigma = np.sqrt(output.sigma2_draws())
    j_total = output.J_total_draws()
    sch = output.schedule
    return FitSummary(
        n=sch.n,
        degrees=output.degrees,
        draws=len(output.draws),
        sigma_hat=float(np.mean(sigma)) if sigma.size else math.nan,
        sigma_hat_mcse=_mcse_or_none(sigma),
        sigma2_mean=float(np.mean(output.sigma2_draws())) if sigma.size else math.nan,
        mean_J={str(k): float(np.mean(output.count_draws(k))) if sigma.size else math.nan for k in output.degrees},
        mean_J_total=float(np.mean(j_total)) if j_total.size else math.nan,
        mean_J_total_mcse=_mcse_or_none(j_total),
        acceptance={name: (None if math.isnan(rate) else rate) for name, rate in output.acceptance.items()},
        scales={str(k): scales for k, scales in output.scales.items()},
        schedule={"b_n": sch.b_n, "phi_n": sch.phi_n, "delta_n": sch.delta_n},
        skipped_joint=output.skipped_joint,
    )
