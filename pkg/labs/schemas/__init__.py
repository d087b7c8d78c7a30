from __future__ import annotations

from .config import BesovCheckConfig, ChainConfig, ExperimentConfig, HyperParams, PhiMode, Standardization
from .results import (
    RESULT_COLUMNS,
    BenchCell,
    BenchRecord,
    CellSummary,
    FitDiagnostics,
    FitSummary,
    RateRecord,
    RecordStatus,
)

__all__ = [
    "RESULT_COLUMNS",
    "BenchCell",
    "BenchRecord",
    "BesovCheckConfig",
    "CellSummary",
    "ChainConfig",
    "ExperimentConfig",
    "FitDiagnostics",
    "FitSummary",
    "HyperParams",
    "PhiMode",
    "RateRecord",
    "RecordStatus",
    "Standardization",
]
