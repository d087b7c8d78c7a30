from __future__ import annotations


class LabsError(Exception):
    """パッケージ共通の基底例外。"""


class ConfigError(LabsError, ValueError):
    """設定ファイルやCLI引数が不正なときに送出される。"""


class LengthMismatchError(LabsError, ValueError):
    """対になる配列の長さが一致しないとき。"""


def ensure_same_length(first, second, *, what: str = "sequences") -> None:
    if len(first) != len(second):
        raise LengthMismatchError(f"{what} must have equal lengths (got {len(first)} and {len(second)}).")
