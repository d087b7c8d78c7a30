"""
コマンドラインのテスト

各サブコマンドの出力ファイルと終了コードを確認します。
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from labs import cli
from labs.schemas.results import BenchRecord, RecordStatus

TINY_CHAIN = {"iterations": 60, "burn_in": 20, "thin": 2, "grid_points": 17, "seed": 1}


def _write_config(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_help_lists_config_keys():
    text = cli.build_parser().format_help()
    assert "config keys" in text
    assert "chain.iterations" in text
    assert "hyper.C_delta" in text


def test_load_config_defaults():
    cfg = cli.load_config(None)
    assert cfg.chain.iterations == 20000
    assert cfg.hyper.degrees == [1, 2]


def test_simulate_then_fit(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    data_path = tmp_path / "blocks.csv"
    config = _write_config(tmp_path / "config.json", {"chain": TINY_CHAIN})

    assert cli.main(["simulate", "--function", "blocks", "--n", "40", "--rsnr", "5", "--out", str(data_path)]) == 0
    assert data_path.exists()
    assert data_path.with_suffix(".json").exists()

    out_dir = tmp_path / "fit"
    assert cli.main(["fit", "--data", str(data_path), "--config", str(config), "--output-dir", str(out_dir)]) == 0
    summary = json.loads((out_dir / "fit_summary.json").read_text(encoding="utf-8"))
    assert summary["n"] == 40
    assert summary["draws"] == 20
    assert summary["diagnostics"]["mse"] >= 0

    with (out_dir / "fitted.csv").open(newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == TINY_CHAIN["grid_points"]
    assert set(rows[0]) == {"x", "f_hat", "f_hat_original"}
    assert (out_dir / "trace.csv").exists()
    assert str(out_dir / "fit_summary.json") in capsys.readouterr().out


def test_benchmark_writes_results(eager_celery, tmp_path: Path):
    config = _write_config(
        tmp_path / "config.json",
        {"functions": ["bumps"], "ns": [32], "rsnrs": [5.0], "replicates": 1, "chain": TINY_CHAIN},
    )
    out_dir = tmp_path / "bench"
    assert cli.main(["benchmark", "--config", str(config), "--output-dir", str(out_dir)]) == 0
    for name in ("results.csv", "failures.csv", "summary.json", "rates.csv"):
        assert (out_dir / name).exists()
    assert len((out_dir / "results.csv").read_text(encoding="utf-8").splitlines()) == 2


def test_benchmark_partial_failure_exit_code(eager_celery, tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    def failing_cell(cell, *_args, **_kwargs):
        return BenchRecord(
            function=cell.function,
            n=cell.n,
            rsnr=cell.rsnr,
            replicate=cell.replicate,
            seed=cell.seed,
            status=RecordStatus.failed,
            error="RuntimeError: boom",
        )

    monkeypatch.setattr("labs.workers.tasks.run_cell", failing_cell)
    config = _write_config(
        tmp_path / "config.json",
        {"functions": ["blocks"], "ns": [32], "rsnrs": [5.0], "replicates": 1, "chain": TINY_CHAIN},
    )
    assert cli.main(["benchmark", "--config", str(config), "--output-dir", str(tmp_path / "bench")]) == 3


def test_besov_check_writes_profile(tmp_path: Path):
    config = _write_config(
        tmp_path / "config.json",
        {"functions": ["heavisine"], "besov": {"grid_sizes": [256, 512], "t_points": 8}},
    )
    out_dir = tmp_path / "besov"
    assert cli.main(["besov-check", "--config", str(config), "--output-dir", str(out_dir)]) == 0
    with (out_dir / "besov_summary.csv").open(newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert [row["grid_size"] for row in rows] == ["256", "512"]
    assert all(row["q"] == "inf" for row in rows)
    profile_lines = (out_dir / "besov_profile.csv").read_text(encoding="utf-8").splitlines()
    assert len(profile_lines) == 1 + 2 * 8


@pytest.mark.parametrize(
    "payload",
    [
        {"chain": {"iterations": 10, "burn_in": 20}},
        {"hyper": {"degrees": []}},
        {"unknown_key": 1},
        {"chain": {"move_probs": [0.5, 0.5, 0.5]}},
    ],
)
def test_invalid_config_exits_with_2(tmp_path: Path, payload: dict):
    config = _write_config(tmp_path / "config.json", payload)
    assert cli.main(["benchmark", "--config", str(config), "--output-dir", str(tmp_path / "out")]) == 2


def test_missing_files_exit_with_2(tmp_path: Path):
    assert cli.main(["benchmark", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["fit", "--data", str(tmp_path / "missing.csv")]) == 2


def test_malformed_json_exits_with_2(tmp_path: Path):
    config = tmp_path / "config.json"
    config.write_text("{not json", encoding="utf-8")
    assert cli.main(["benchmark", "--config", str(config)]) == 2


def test_bad_dataset_exits_with_2(tmp_path: Path):
    data = tmp_path / "bad.csv"
    data.write_text("a,b\n1,2\n", encoding="utf-8")
    assert cli.main(["fit", "--data", str(data), "--output-dir", str(tmp_path / "fit")]) == 2


def test_unknown_function_is_rejected_by_argparse():
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["simulate", "--function", "sawtooth", "--n", "10", "--rsnr", "3"])
    assert excinfo.value.code == 2


def test_single_observation_dataset_exits_with_2(tmp_path: Path):
    data = tmp_path / "one.csv"
    data.write_text("x,y\n0.5,1.0\n", encoding="utf-8")
    assert cli.main(["fit", "--data", str(data), "--output-dir", str(tmp_path / "fit")]) == 2
    assert not (tmp_path / "fit" / "fit_summary.json").exists()
