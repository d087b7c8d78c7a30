import os
from pathlib import Path

os.environ.setdefault("LABS_SKIP_DOTENV", "1")

import numpy as np
import pytest

from labs.core import settings as settings_module
from labs.schemas.config import ChainConfig, HyperParams


@pytest.fixture(autouse=True)
def clear_settings_cache():
    settings_module.get_settings.cache_clear()
    yield
    settings_module.get_settings.cache_clear()


@pytest.fixture(name="eager_celery")
def fixture_eager_celery(monkeypatch: pytest.MonkeyPatch):
    """Celery をブローカー無しの eager モードに切り替える"""
    monkeypatch.setenv("CELERY_TASK_ALWAYS_EAGER", "true")
    monkeypatch.setenv("CELERY_TASK_EAGER_PROPAGATES", "true")
    monkeypatch.setenv("CELERY_BROKER_URL", "memory://")
    settings_module.get_settings.cache_clear()
    from labs.workers import configure_celery_app

    configure_celery_app()
    yield
    settings_module.get_settings.cache_clear()
    configure_celery_app()


@pytest.fixture(name="output_dir")
def fixture_output_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """LABS_OUTPUT_DIR を一時ディレクトリに向ける"""
    out = tmp_path / "results"
    monkeypatch.setenv("LABS_OUTPUT_DIR", str(out))
    return out


@pytest.fixture(name="rng")
def fixture_rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(name="small_chain")
def fixture_small_chain() -> ChainConfig:
    """数秒で終わる短いチェーン設定"""
    return ChainConfig(iterations=120, burn_in=40, thin=4, grid_points=33, seed=7)


@pytest.fixture(name="hyper")
def fixture_hyper() -> HyperParams:
    return HyperParams()
