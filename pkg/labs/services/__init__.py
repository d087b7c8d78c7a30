from __future__ import annotations

from .benchmark import resolve_output_dir, run_benchmark
from .cells import derive_subseed, iter_cells, run_cell
from .fitting import FitResult, fit_dataset, fit_diagnostics, truth_spec_for
from .rates import RateFitError, rate_fit
from .results import ResultWriteError, ResultWriter, emit_results, rate_records, summarize_records

__all__ = [
    "FitResult",
    "RateFitError",
    "ResultWriteError",
    "ResultWriter",
    "derive_subseed",
    "emit_results",
    "fit_dataset",
    "fit_diagnostics",
    "iter_cells",
    "rate_fit",
    "rate_records",
    "resolve_output_dir",
    "run_benchmark",
    "run_cell",
    "summarize_records",
    "truth_spec_for",
]
