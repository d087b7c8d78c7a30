"""
ベンチマーク層（セル実行・集計・結果出力）のテスト
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from labs.schemas.config import ChainConfig, ExperimentConfig, HyperParams
from labs.schemas.results import RESULT_COLUMNS, BenchCell, BenchRecord, RecordStatus
from labs.services import (
    RateFitError,
    ResultWriteError,
    ResultWriter,
    derive_subseed,
    emit_results,
    fit_dataset,
    iter_cells,
    rate_fit,
    rate_records,
    resolve_output_dir,
    run_benchmark,
    run_cell,
    summarize_records,
    truth_spec_for,
)
from labs.services import cells as cells_module
from labs.testbed import Dataset, generate_dataset


def _record(function: str, n: int, replicate: int, mse: float, *, rsnr: float = 5.0) -> BenchRecord:
    return BenchRecord(
        function=function,
        n=n,
        rsnr=rsnr,
        replicate=replicate,
        mse=mse,
        log_mse=math.log(mse),
        sigma_hat=0.2,
        mean_J_total=4.5,
        wall_seconds=0.25,
        seed=derive_subseed(0, function, n, rsnr, replicate),
        baseline_mse=2 * mse,
    )


class TestSubseed:
    """(master, function, n, rsnr, replicate) からのサブシード"""

    def test_deterministic(self):
        assert derive_subseed(1, "blocks", 128, 5.0, 0) == derive_subseed(1, "blocks", 128, 5.0, 0)

    def test_distinct_and_in_range(self):
        seeds = {
            derive_subseed(0, fid, n, rsnr, rep)
            for fid in ("blocks", "bumps")
            for n in (128, 1024)
            for rsnr in (3.0, 5.0)
            for rep in range(5)
        }
        assert len(seeds) == 40
        assert all(0 <= seed < 2**64 for seed in seeds)

    def test_integer_and_float_rsnr_agree(self):
        assert derive_subseed(0, "blocks", 128, 5, 0) == derive_subseed(0, "blocks", 128, 5.0, 0)


def test_iter_cells_order():
    cfg = ExperimentConfig(functions=["blocks", "doppler"], ns=[32, 64], rsnrs=[3.0], replicates=2)
    cells = iter_cells(cfg)
    assert len(cells) == 8
    assert [(c.function, c.n, c.replicate) for c in cells[:4]] == [
        ("blocks", 32, 0),
        ("blocks", 32, 1),
        ("blocks", 64, 0),
        ("blocks", 64, 1),
    ]
    assert cells[0].seed == derive_subseed(cfg.seed, "blocks", 32, 3.0, 0)


class TestRunCell:
    """1セルの実行"""

    def _cell(self) -> BenchCell:
        seed = derive_subseed(0, "heavisine", 48, 5.0, 0)
        return BenchCell(function="heavisine", n=48, rsnr=5.0, replicate=0, seed=seed)

    def test_produces_one_record(self, small_chain: ChainConfig, hyper: HyperParams):
        record = run_cell(self._cell(), hyper, small_chain, grid_size=2**12)
        assert record.status is RecordStatus.ok
        assert record.mse is not None and record.mse >= 0
        assert record.log_mse == pytest.approx(math.log(record.mse))
        assert record.sigma_hat > 0
        assert record.baseline_mse > 0

    def test_deterministic(self, small_chain: ChainConfig, hyper: HyperParams):
        first = run_cell(self._cell(), hyper, small_chain, grid_size=2**12)
        second = run_cell(self._cell(), hyper, small_chain, grid_size=2**12)
        assert first.model_dump(exclude={"wall_seconds"}) == second.model_dump(exclude={"wall_seconds"})

    def test_failure_is_recorded(self, monkeypatch: pytest.MonkeyPatch, small_chain: ChainConfig, hyper: HyperParams):
        def broken_chain(*_args, **_kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr(cells_module, "run_chain", broken_chain)
        record = run_cell(self._cell(), hyper, small_chain, grid_size=2**12)
        assert record.failed
        assert record.mse is None
        assert "RuntimeError: boom" in record.error


class TestRateFit:
    """log-log 回帰による収束レート"""

    def test_exact_power_law(self):
        ns = [128, 1024, 8192]
        slope, intercept = rate_fit(ns, [3.0 * n ** (-2 / 3) for n in ns])
        assert slope == pytest.approx(-2 / 3, abs=1e-12)
        assert intercept == pytest.approx(math.log(3.0), abs=1e-10)

    def test_constant(self):
        slope, _ = rate_fit([128, 1024, 8192], [0.1, 0.1, 0.1])
        assert slope == pytest.approx(0.0, abs=1e-12)

    def test_log_corrected_rate(self):
        ns = [128, 1024, 8192]
        slope, _ = rate_fit(ns, [n ** (-2 / 3) * math.log(n) ** 4 for n in ns])
        oracle = np.polyfit(np.log(ns), [-2 / 3 * math.log(n) + 4 * math.log(math.log(n)) for n in ns], 1)[0]
        # 対数因子の分だけ n^{-2/3} より傾きが緩くなる
        assert -2 / 3 < slope < 0.0
        assert slope == pytest.approx(oracle, abs=1e-10)

    def test_needs_three_points(self):
        with pytest.raises(RateFitError):
            rate_fit([128, 1024], [0.1, 0.05])
        with pytest.raises(RateFitError):
            rate_fit([128, 128, 1024], [0.1, 0.1, 0.05])
        with pytest.raises(RateFitError):
            rate_fit([128, 1024, 8192], [0.1, 0.0, 0.05])


class TestEmitResults:
    """results.csv / summary.json / rates.csv の出力"""

    def test_single_record(self, tmp_path: Path):
        emit_results([_record("blocks", 128, 0, 0.05)], tmp_path)
        lines = (tmp_path / "results.csv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        assert lines[0] == "function,n,rsnr,replicate,mse,log_mse,sigma_hat,mean_J_total,wall_seconds"
        assert lines[0].split(",") == list(RESULT_COLUMNS)

    def test_re_emission_is_byte_identical(self, tmp_path: Path):
        records = [_record("bumps", n, rep, 0.01 * (rep + 1) / n) for n in (128, 1024, 8192) for rep in range(3)]
        first = emit_results(records, tmp_path / "a")
        second = emit_results(records, tmp_path / "b")
        for left, right in zip(first, second, strict=True):
            assert left.read_bytes() == right.read_bytes()

    def test_summary_medians_match_sort_oracle(self, tmp_path: Path):
        mses = [0.3, 0.1, 0.7, 0.2, 0.5]
        emit_results([_record("doppler", 256, rep, value) for rep, value in enumerate(mses)], tmp_path)
        payload = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        (cell,) = payload["cells"]
        logs = sorted(math.log(value) for value in mses)
        assert cell["median_log_mse"] == pytest.approx(logs[2])
        assert cell["median_mse"] == pytest.approx(0.3)
        assert cell["count"] == 5
        assert cell["failed"] == 0
        assert cell["iqr_log_mse"] == pytest.approx(logs[3] - logs[1])

    def test_failures_go_to_separate_file(self, tmp_path: Path):
        failed = BenchRecord(
            function="blocks", n=128, rsnr=5.0, replicate=1, seed=1, status=RecordStatus.failed, error="boom"
        )
        emit_results([_record("blocks", 128, 0, 0.05), failed], tmp_path)
        assert len((tmp_path / "results.csv").read_text(encoding="utf-8").splitlines()) == 2
        with (tmp_path / "failures.csv").open(newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert rows[0]["error"] == "boom"
        (cell,) = summarize_records([_record("blocks", 128, 0, 0.05), failed])
        assert cell.failed == 1

    def test_rates_file(self, tmp_path: Path):
        records = [_record("blocks", n, 0, n ** (-0.5)) for n in (128, 1024, 8192)]
        emit_results(records, tmp_path)
        with (tmp_path / "rates.csv").open(newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 1
        assert float(rows[0]["slope"]) == pytest.approx(-0.5)

    def test_rate_records_skip_short_groups(self):
        cells = summarize_records([_record("blocks", n, 0, 0.1) for n in (128, 1024)])
        assert rate_records(cells) == []

    def test_empty_records(self, tmp_path: Path):
        with pytest.raises(ValueError):
            emit_results([], tmp_path)

    def test_refuses_to_escape_directory(self, tmp_path: Path):
        writer = ResultWriter(tmp_path / "out")
        with pytest.raises(ResultWriteError):
            writer.path("../escape.csv")


class TestRunBenchmark:
    """Celery 経由のスイープ"""

    def test_single_cell_sweep(self, eager_celery, tmp_path: Path, small_chain: ChainConfig):
        cfg = ExperimentConfig(
            functions=["blocks"], ns=[40], rsnrs=[5.0], replicates=1, chain=small_chain, output_dir=str(tmp_path)
        )
        writer = ResultWriter(resolve_output_dir(cfg))
        records = run_benchmark(cfg, writer=writer)
        writer.finalize()
        assert len(records) == 1
        assert not records[0].failed
        assert len((tmp_path / "results.csv").read_text(encoding="utf-8").splitlines()) == 2
        assert (tmp_path / "summary.json").exists()

    def test_identical_config_gives_identical_records(self, eager_celery, small_chain: ChainConfig):
        cfg = ExperimentConfig(functions=["bumps"], ns=[40], rsnrs=[10.0], replicates=2, chain=small_chain, seed=3)
        first = [r.model_dump(exclude={"wall_seconds"}) for r in run_benchmark(cfg)]
        second = [r.model_dump(exclude={"wall_seconds"}) for r in run_benchmark(cfg)]
        assert first == second

    def test_output_dir_falls_back_to_settings(self, output_dir: Path):
        assert resolve_output_dir(ExperimentConfig()) == output_dir


class TestFitDataset:
    """単一データセットの当てはめと診断"""

    def test_fit_with_known_truth(self, small_chain: ChainConfig, hyper: HyperParams):
        data = generate_dataset("heavisine", 60, 5.0, seed=12, grid_size=2**12)
        result = fit_dataset(data, hyper, small_chain, grid_size=2**12)
        assert result.fitted_grid.shape == (small_chain.grid_points,)
        diagnostics = result.summary.diagnostics
        assert diagnostics is not None
        assert diagnostics.mse >= 0
        assert 0 <= diagnostics.hellinger <= 1
        sigma_upper = max(float(np.sqrt(result.output.sigma2_draws()).max()), data.sigma0)
        c_f = diagnostics.clip_level**2 + 8.0 * sigma_upper**2
        assert diagnostics.l2_bound == pytest.approx(math.sqrt(1.5 * c_f) * diagnostics.hellinger)

    def test_fit_without_truth(self, rng: np.random.Generator, small_chain: ChainConfig, hyper: HyperParams):
        xs = rng.uniform(0.0, 1.0, size=40)
        data = Dataset(xs=xs, ys=np.sin(6.0 * xs) + 0.1 * rng.standard_normal(40))
        result = fit_dataset(data, hyper, small_chain)
        assert truth_spec_for(data) is None
        assert result.summary.diagnostics is None
        assert result.summary.n == 40

    def test_fit_needs_data(self, small_chain: ChainConfig, hyper: HyperParams):
        with pytest.raises(ValueError):
            fit_dataset(Dataset.empty(), hyper, small_chain)
