from __future__ import annotations

import logging
import os
from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)

_dotenv_disabled = os.environ.get("LABS_SKIP_DOTENV", "").lower() in {
    "1",
    "true",
    "yes",
}
COMMON_ENV_CONFIG = {
    "env_file": None if _dotenv_disabled else ".env",
    "env_file_encoding": "utf-8",
    "extra": "ignore",
}

_LOG_LEVELS = {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"}


class RunSettings(BaseSettings):
    """CLI実行時の共通設定（ログ、出力先、評価グリッド）。"""

    model_config = SettingsConfigDict(
        **COMMON_ENV_CONFIG,
        env_prefix="LABS_",
    )

    log_level: str = "INFO"
    output_dir: str = "./var/results"
    grid_points: int = 201
    standardization_grid: int = 2**14

    @field_validator("log_level", mode="before")
    @classmethod
    def _parse_log_level(cls, value: str) -> str:
        normalized = str(value or "INFO").strip().upper()
        if normalized not in _LOG_LEVELS:
            logger.warning("Unsupported log level '%s'; falling back to 'INFO'.", value)
            return "INFO"
        return normalized

    @field_validator("grid_points")
    @classmethod
    def _validate_grid_points(cls, value: int) -> int:
        if value < 2:
            raise ValueError("LABS_GRID_POINTS must be at least 2.")
        return value

    @field_validator("standardization_grid")
    @classmethod
    def _validate_standardization_grid(cls, value: int) -> int:
        if value < 1000:
            raise ValueError("LABS_STANDARDIZATION_GRID must be at least 1000.")
        return value

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir).expanduser()


class CelerySettings(BaseSettings):
    """ベンチマークセルを配布するCeleryの設定。"""

    model_config = SettingsConfigDict(
        **COMMON_ENV_CONFIG,
        env_prefix="CELERY_",
    )

    broker_url: str = "memory://"
    result_backend: str | None = "cache+memory://"
    task_default_queue: str = "labs_benchmark"
    # ブローカー無しでも手元で動くよう既定はeager実行
    task_always_eager: bool = True
    task_eager_propagates: bool = True
    worker_concurrency: int = 4

    @field_validator("worker_concurrency")
    @classmethod
    def _validate_concurrency(cls, value: int) -> int:
        if value < 1:
            raise ValueError("CELERY_WORKER_CONCURRENCY must be at least 1.")
        return value


class AppSettings(BaseSettings):
    """アプリ全体の設定。環境変数や .env から読み込む。"""

    model_config = SettingsConfigDict(
        **COMMON_ENV_CONFIG,
    )

    env: str = Field(default="development", alias="LABS_ENV")

    run: RunSettings = Field(default_factory=RunSettings)
    celery: CelerySettings = Field(default_factory=CelerySettings)


@lru_cache(maxsize=1)
def get_settings() -> AppSettings:
    """アプリ設定をキャッシュ付きで取得する。"""
    return AppSettings()
