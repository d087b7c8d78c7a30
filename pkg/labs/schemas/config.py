from __future__ import annotations

import logging
import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from labs.splines.basis import MAX_DEGREE
from labs.testbed.functions import TestFunctionId

logger = logging.getLogger(__name__)


class PhiMode(str, Enum):
    table = "table"
    theory = "theory"


class Standardization(str, Enum):
    truth = "truth"
    empirical = "empirical"


# --- Model hyperparameters ---


class HyperParams(BaseModel):
    """LABS 事前分布のハイパーパラメータ（JSON設定の `hyper` ブロック）。"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    degrees: list[int] = Field(default_factory=lambda: [1, 2], description="B-spline degree set S")
    a: float | dict[int, float] = Field(
        default=1.0, description="gamma shape a_k for M_k (number, or mapping degree -> shape)"
    )
    C_b: float = Field(default=1e-4, gt=0.0, description="b_n = exp(C_b (log n)^2)")
    C_phi: float = Field(
        default=1.5, gt=0.0, description="phi_n = C_phi log n (table) or exp(C_phi (log n)^2) (theory)"
    )
    phi_mode: PhiMode = Field(default=PhiMode.table, description="coefficient-scale schedule: 'table' or 'theory'")
    C_delta: float = Field(default=1.0, gt=0.0, description="delta_n = exp(-C_delta (log n)^2)")
    r: float = Field(default=0.01, gt=0.0, description="sigma^2 ~ Inv-Gam(r/2, rR/2)")
    R: float = Field(default=1.0, gt=0.0, description="sigma^2 ~ Inv-Gam(r/2, rR/2)")
    A: float = Field(default=0.0, ge=0.0, description="knot domain extension: knots live in [-A, 1+A]")
    n: int | None = Field(
        default=None, ge=2, description="sample size used for the schedule (defaults to the data size)"
    )
    sigma2_bounds: tuple[float, float] | None = Field(
        default=None, description="optional truncation [lower, upper] of the sigma^2 prior"
    )

    @field_validator("degrees")
    @classmethod
    def _validate_degrees(cls, value: list[int]) -> list[int]:
        if not value:
            raise ValueError("degrees must not be empty")
        degrees = sorted(set(value))
        if degrees[0] < 0 or degrees[-1] > MAX_DEGREE:
            raise ValueError(f"degrees must lie in [0, {MAX_DEGREE}]")
        if 0 in degrees:
            logger.warning("Degree 0 in S: piecewise-constant atoms fall outside the contraction theory (k >= 1).")
        return degrees

    @field_validator("a")
    @classmethod
    def _validate_shape(cls, value: float | dict[int, float]) -> float | dict[int, float]:
        shapes = value.values() if isinstance(value, dict) else [value]
        if any(shape <= 0 for shape in shapes):
            raise ValueError("gamma shapes must be positive")
        return value

    @field_validator("sigma2_bounds")
    @classmethod
    def _validate_bounds(cls, value: tuple[float, float] | None) -> tuple[float, float] | None:
        if value is not None and not 0.0 < value[0] < value[1]:
            raise ValueError("sigma2_bounds must satisfy 0 < lower < upper")
        return value

    @model_validator(mode="after")
    def _check_shape_keys(self) -> HyperParams:
        if isinstance(self.a, dict):
            missing = set(self.degrees) - set(self.a)
            if missing:
                raise ValueError(f"gamma shape missing for degrees {sorted(missing)}")
        return self

    def gamma_shape(self, degree: int) -> float:
        if isinstance(self.a, dict):
            return float(self.a[degree])
        return float(self.a)

    @property
    def knot_domain(self) -> tuple[float, float]:
        return (-self.A, 1.0 + self.A)

    @property
    def domain_length(self) -> float:
        return 1.0 + 2.0 * self.A


# --- Sampler configuration ---


class ChainConfig(BaseModel):
    """可逆ジャンプMCMCの実行設定（JSON設定の `chain` ブロック）。"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    iterations: int = Field(default=20000, ge=1, description="total sweeps including burn-in")
    burn_in: int = Field(default=10000, ge=0, description="sweeps discarded before recording")
    thin: int = Field(default=10, ge=1, description="keep every thin-th post-burn-in sweep")
    move_probs: tuple[float, float, float] = Field(
        default=(1 / 3, 1 / 3, 1 / 3), description="(p_birth, p_death, p_update) per degree and sweep"
    )
    s_beta: float | None = Field(
        default=None, ge=0.0, description="coefficient random-walk scale (null: 0.25*min(phi_n, sd(y)))"
    )
    s_knot: float | None = Field(default=None, ge=0.0, description="knot random-walk scale (null: 0.05*(1+2A))")
    joint_beta_every: int = Field(default=10, ge=0, description="joint conjugate coefficient sweep period (0: off)")
    seed: int = Field(default=0, ge=0, lt=2**64, description="chain random seed")
    adapt: bool = Field(default=True, description="Robbins-Monro scale adaptation during burn-in")
    target_accept: float = Field(default=0.30, gt=0.0, lt=1.0, description="adaptation target for update moves")
    max_atoms: int | None = Field(default=None, ge=0, description="per-degree cap on J_k (null: none)")
    grid_points: int = Field(default=201, ge=2, description="posterior-mean evaluation grid on [0, 1]")
    record_trace: bool = Field(default=True, description="keep the per-sweep trace")

    @model_validator(mode="after")
    def _check_consistency(self) -> ChainConfig:
        if self.burn_in >= self.iterations:
            raise ValueError("burn_in must be smaller than iterations")
        if any(p < 0 for p in self.move_probs):
            raise ValueError("move probabilities must be nonnegative")
        if not math.isclose(sum(self.move_probs), 1.0, abs_tol=1e-9):
            raise ValueError("move probabilities must sum to 1")
        return self

    @property
    def expected_draws(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


# --- Experiment configuration ---


class BesovCheckConfig(BaseModel):
    """`besov-check` サブコマンドの設定。"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    grid_sizes: list[int] = Field(default_factory=lambda: [2**10, 2**12, 2**14], description="grid resolutions")
    s: float = Field(default=1.0, gt=0.0, description="smoothness s (r = floor(s) + 1)")
    p: float = Field(default=1.0, gt=0.0, description="integrability p ('inf' allowed)")
    q: float = Field(default=math.inf, gt=0.0, description="aggregation q ('inf' allowed)")
    t_points: int = Field(default=48, ge=2, description="log-spaced scales between 4/grid_size and 1")

    @field_validator("grid_sizes")
    @classmethod
    def _validate_grid_sizes(cls, value: list[int]) -> list[int]:
        if not value or min(value) < 8:
            raise ValueError("grid_sizes must be nonempty with entries >= 8")
        return value


class ExperimentConfig(BaseModel):
    """シミュレーション実験全体の設定（`--config` で渡すJSON）。"""

    model_config = ConfigDict(extra="forbid")

    functions: list[TestFunctionId] = Field(
        default_factory=lambda: list(TestFunctionId), description="test functions to sweep"
    )
    ns: list[int] = Field(default_factory=lambda: [128, 512, 2048], min_length=1, description="sample sizes")
    rsnrs: list[float] = Field(default_factory=lambda: [3.0, 5.0, 10.0], min_length=1, description="RSNR levels")
    replicates: int = Field(default=20, ge=1, description="datasets per (function, n, rsnr) cell")
    hyper: HyperParams = Field(default_factory=HyperParams, description="prior hyperparameters")
    chain: ChainConfig = Field(default_factory=ChainConfig, description="sampler settings")
    output_dir: str | None = Field(default=None, description="result directory (null: LABS_OUTPUT_DIR)")
    seed: int = Field(default=0, ge=0, description="master seed for sub-seed derivation")
    standardization: Standardization = Field(
        default=Standardization.truth, description="'truth' (unit-sd truth) or 'empirical' (per-dataset)"
    )
    besov: BesovCheckConfig = Field(default_factory=BesovCheckConfig, description="besov-check settings")

    @field_validator("ns")
    @classmethod
    def _validate_ns(cls, value: list[int]) -> list[int]:
        if any(n < 2 for n in value):
            raise ValueError("every n must be at least 2")
        return value

    @field_validator("rsnrs")
    @classmethod
    def _validate_rsnrs(cls, value: list[float]) -> list[float]:
        if any(not rsnr > 0 for rsnr in value):
            raise ValueError("every rsnr must be positive")
        return value
