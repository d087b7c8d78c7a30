from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, ValidationError

from labs.core.errors import ConfigError, LabsError
from labs.core.settings import AppSettings, get_settings
from labs.diagnostics.besov import (
    GridFunction,
    besov_norm_estimate,
    besov_profile,
    besov_seminorm_estimate,
    default_t_grid,
    empirical_slope,
)
from labs.sampler.diagnostics import write_trace
from labs.schemas.config import ChainConfig, ExperimentConfig
from labs.services.benchmark import resolve_output_dir, run_benchmark
from labs.services.fitting import fit_dataset
from labs.services.results import ResultWriter
from labs.testbed.data import DatasetFormatError, generate_dataset, read_dataset, write_dataset
from labs.testbed.functions import TestFunctionId, standardized_truth

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


# --- config ---


def load_config(path: str | Path | None) -> ExperimentConfig:
    """JSON設定を読み込む。省略時は既定値。"""
    if path is None:
        return ExperimentConfig()
    config_path = Path(path)
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {config_path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {config_path} ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return ExperimentConfig.model_validate(raw)


def _describe_model(model: type[BaseModel], prefix: str = "") -> list[str]:
    lines = []
    for name, info in model.model_fields.items():
        annotation = info.annotation
        if isinstance(annotation, type) and issubclass(annotation, BaseModel):
            lines.extend(_describe_model(annotation, f"{prefix}{name}."))
            continue
        default = info.get_default(call_default_factory=True)
        if isinstance(default, list):
            default = [getattr(item, "value", item) for item in default]
        default = getattr(default, "value", default)
        lines.append(f"  {prefix}{name}: {info.description or ''} (default: {default})")
    return lines


def config_epilog() -> str:
    return "config keys (--config JSON):\n" + "\n".join(_describe_model(ExperimentConfig))


def _chain_with_settings(chain: ChainConfig, settings: AppSettings) -> ChainConfig:
    if "grid_points" in chain.model_fields_set:
        return chain
    return chain.model_copy(update={"grid_points": settings.run.grid_points})


# --- subcommands ---


def cmd_simulate(args: argparse.Namespace, cfg: ExperimentConfig, settings: AppSettings) -> int:
    seed = args.seed if args.seed is not None else cfg.seed
    dataset = generate_dataset(
        args.function,
        args.n,
        args.rsnr,
        seed,
        standardization=cfg.standardization.value,
        grid_size=settings.run.standardization_grid,
    )
    out = Path(args.out) if args.out else settings.run.output_path / f"{args.function}_n{args.n}_seed{seed}.csv"
    path = write_dataset(dataset, out)
    logger.info("Wrote dataset to %s", path)
    print(path)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace, cfg: ExperimentConfig, settings: AppSettings) -> int:
    data = read_dataset(args.data)
    if data.n < 2:
        raise DatasetFormatError(f"{args.data}: fit needs at least 2 observations, got {data.n}")
    chain = _chain_with_settings(cfg.chain, settings)
    if args.seed is not None:
        chain = chain.model_copy(update={"seed": args.seed})
    result = fit_dataset(data, cfg.hyper, chain, grid_size=settings.run.standardization_grid)

    out_dir = Path(args.output_dir) if args.output_dir else resolve_output_dir(cfg, settings)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / "fit_summary.json"
    summary_path.write_text(
        json.dumps(result.summary.model_dump(mode="json"), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    fitted_path = out_dir / "fitted.csv"
    with fitted_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("x", "f_hat", "f_hat_original"))
        for x, value in zip(result.grid, result.fitted_grid, strict=True):
            writer.writerow((repr(float(x)), repr(float(value)), repr(float(data.center + data.scale * value))))
    if chain.record_trace:
        write_trace(result.output, out_dir / "trace.csv")
    logger.info("Wrote fit outputs to %s", out_dir)
    print(summary_path)
    return EXIT_OK


def cmd_benchmark(args: argparse.Namespace, cfg: ExperimentConfig, settings: AppSettings) -> int:
    if args.seed is not None:
        cfg = cfg.model_copy(update={"seed": args.seed})
    chain = _chain_with_settings(cfg.chain, settings)
    cfg = cfg.model_copy(update={"chain": chain})
    out_dir = Path(args.output_dir) if args.output_dir else resolve_output_dir(cfg, settings)
    writer = ResultWriter(out_dir)
    records = run_benchmark(cfg, writer=writer, settings=settings)
    writer.finalize()
    print(out_dir)
    if any(record.failed for record in records):
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_besov_check(args: argparse.Namespace, cfg: ExperimentConfig, settings: AppSettings) -> int:
    besov = cfg.besov
    out_dir = Path(args.output_dir) if args.output_dir else resolve_output_dir(cfg, settings)
    out_dir.mkdir(parents=True, exist_ok=True)
    profile_path = out_dir / "besov_profile.csv"
    summary_path = out_dir / "besov_summary.csv"
    q_label = "inf" if math.isinf(besov.q) else besov.q
    p_label = "inf" if math.isinf(besov.p) else besov.p

    with (
        profile_path.open("w", newline="", encoding="utf-8") as profile_handle,
        summary_path.open("w", newline="", encoding="utf-8") as summary_handle,
    ):
        profile_writer = csv.writer(profile_handle, lineterminator="\n")
        summary_writer = csv.writer(summary_handle, lineterminator="\n")
        profile_writer.writerow(("function", "grid_size", "s", "p", "t", "modulus", "scaled"))
        summary_writer.writerow(("function", "grid_size", "s", "p", "q", "seminorm", "norm", "slope"))
        for function in cfg.functions:
            func, _, _ = standardized_truth(function, settings.run.standardization_grid)
            for grid_size in besov.grid_sizes:
                g = GridFunction.from_callable(func, grid_size)
                t_grid = default_t_grid(g, besov.t_points)
                profile = besov_profile(g, besov.s, besov.p, t_grid)
                for t, modulus, scaled in profile:
                    profile_writer.writerow(
                        (function.value, grid_size, besov.s, p_label, *(repr(float(v)) for v in (t, modulus, scaled)))
                    )
                seminorm = besov_seminorm_estimate(g, besov.s, besov.p, besov.q, t_grid)
                norm = besov_norm_estimate(g, besov.s, besov.p, besov.q, t_grid)
                slope = empirical_slope(profile)
                summary_writer.writerow(
                    (function.value, grid_size, besov.s, p_label, q_label, repr(seminorm), repr(norm), repr(slope))
                )
                logger.info(
                    "besov-check %s grid=%s: seminorm=%.4g slope=%.3f", function.value, grid_size, seminorm, slope
                )
    print(profile_path)
    return EXIT_OK


# --- parser ---


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment JSON config (see keys below)")
    common.add_argument("--seed", type=int, help="override the seed (dataset, chain or master seed)")

    parser = argparse.ArgumentParser(
        prog="labs",
        description="Bayesian multi-degree B-spline regression with reversible-jump MCMC.",
        epilog=config_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser(
        "simulate",
        parents=[common],
        help="generate a test-function dataset (CSV + JSON sidecar)",
        epilog=config_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    simulate.add_argument("--function", required=True, choices=[f.value for f in TestFunctionId])
    simulate.add_argument("--n", type=int, required=True)
    simulate.add_argument("--rsnr", type=float, required=True)
    simulate.add_argument("--out", help="output CSV path")
    simulate.set_defaults(handler=cmd_simulate)

    fit = sub.add_parser(
        "fit",
        parents=[common],
        help="fit one dataset and write the posterior summary and fitted curve",
        epilog=config_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    fit.add_argument("--data", required=True, help="dataset CSV written by 'simulate' (x,y columns)")
    fit.add_argument("--output-dir", help="directory for fit_summary.json, fitted.csv and trace.csv")
    fit.set_defaults(handler=cmd_fit)

    benchmark = sub.add_parser(
        "benchmark",
        parents=[common],
        help="run the simulation sweep and write results.csv, summary.json and rates.csv",
        epilog=config_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    benchmark.add_argument("--output-dir", help="result directory (overrides output_dir)")
    benchmark.set_defaults(handler=cmd_benchmark)

    besov = sub.add_parser(
        "besov-check",
        parents=[common],
        help="estimate moduli of smoothness and Besov seminorms of the test functions",
        epilog=config_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    besov.add_argument("--output-dir", help="directory for besov_profile.csv and besov_summary.csv")
    besov.set_defaults(handler=cmd_besov_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=settings.run.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        return args.handler(args, cfg, settings)
    except (ValidationError, ConfigError, DatasetFormatError) as exc:
        logger.error("Configuration error: %s", exc)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        logger.error("File not found: %s", exc)
        return EXIT_CONFIG
    except LabsError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR
    except ValueError as exc:
        logger.error("Invalid argument: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
