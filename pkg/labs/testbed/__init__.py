from __future__ import annotations

from .baseline import regressogram
from .data import (
    Dataset,
    DatasetFormatError,
    generate_dataset,
    mse,
    read_dataset,
    root_snr,
    write_dataset,
)
from .functions import (
    DomainError,
    TestFunctionId,
    ZeroScaleError,
    eval_test_function,
    standardize,
    standardized_truth,
    truth_values,
)

__all__ = [
    "Dataset",
    "DatasetFormatError",
    "DomainError",
    "TestFunctionId",
    "ZeroScaleError",
    "eval_test_function",
    "generate_dataset",
    "mse",
    "read_dataset",
    "regressogram",
    "root_snr",
    "standardize",
    "standardized_truth",
    "truth_values",
    "write_dataset",
]
