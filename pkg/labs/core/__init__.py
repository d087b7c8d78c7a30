from __future__ import annotations

from .errors import ConfigError, LabsError, LengthMismatchError
from .settings import AppSettings, get_settings

__all__ = [
    "AppSettings",
    "ConfigError",
    "LabsError",
    "LengthMismatchError",
    "get_settings",
]
