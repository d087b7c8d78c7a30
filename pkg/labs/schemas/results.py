from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, Field

# results.csv のヘッダ（この順序で固定）
RESULT_COLUMNS = (
    "function",
    "n",
    "rsnr",
    "replicate",
    "mse",
    "log_mse",
    "sigma_hat",
    "mean_J_total",
    "wall_seconds",
)


class RecordStatus(str, Enum):
    ok = "ok"
    failed = "failed"


# --- Benchmark ---


class BenchRecord(BaseModel):
    """ベンチマーク1セル（関数 × n × RSNR × 反復）の結果。"""

    function: str
    n: int
    rsnr: float
    replicate: int
    mse: float | None = Field(default=None, ge=0.0)
    log_mse: float | None = None
    sigma_hat: float | None = None
    mean_J_total: float | None = None
    wall_seconds: float = 0.0
    seed: int
    baseline_mse: float | None = Field(default=None, ge=0.0)
    status: RecordStatus = RecordStatus.ok
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.status is RecordStatus.failed


class CellSummary(BaseModel):
    """(関数, n, RSNR) ごとの log-MSE の箱ひげ統計。"""

    function: str
    n: int
    rsnr: float
    count: int
    failed: int
    median_log_mse: float | None = None
    q1_log_mse: float | None = None
    q3_log_mse: float | None = None
    iqr_log_mse: float | None = None
    median_mse: float | None = None
    median_baseline_mse: float | None = None
    median_sigma_hat: float | None = None


class RateRecord(BaseModel):
    function: str
    rsnr: float
    slope: float
    intercept: float
    points: int


# --- Single fit ---


class FitDiagnostics(BaseModel):
    """真値が分かっているときの当てはめ診断。"""

    mse: float
    hellinger: float = Field(description="root average squared Hellinger distance d_nH")
    clip_level: float = Field(description="F = max |f0| on the standardised scale")
    clipped_l2: float = Field(description="L2 error of the clipped posterior-mean fit at the design points")
    l2_bound: float = Field(description="sqrt(3 C_F / 2) d_nH with C_F = F^2 + 8 sigma_upper^2")
    sigma_error: float


class FitSummary(BaseModel):
    """`fit` サブコマンドが書き出す事後要約。"""

    n: int
    degrees: list[int]
    draws: int
    sigma_hat: float
    sigma_hat_mcse: float | None = None
    sigma2_mean: float
    mean_J: dict[str, float]
    mean_J_total: float
    mean_J_total_mcse: float | None = None
    acceptance: dict[str, float | None]
    scales: dict[str, tuple[float, float]]
    schedule: dict[str, float]
    skipped_joint: int = 0
    diagnostics: FitDiagnostics | None = None


class BenchCell(BaseModel):
    """ベンチマークの1セル。seed は (master, function, n, rsnr, replicate) から導出する。"""

    function: str
    n: int
    rsnr: float
    replicate: int
    seed: int
