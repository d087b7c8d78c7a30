from __future__ import annotations

import math
from collections.abc import Iterable


def contraction_rate(n: int, s: float) -> float:
    """事後収縮レート ε_n = n^{−s/(2s+1)} (log n)²。"""
    if n < 2 or not s > 0:
        raise ValueError("contraction_rate needs n >= 2 and s > 0")
    return n ** (-s / (2.0 * s + 1.0)) * math.log(n) ** 2


def admissible_degree(s: float, p: float, degrees: Iterable[int]) -> int | None:
    """
    s > (1/p − 1/2)_+ かつ s < min(k, k − 1 + 1/p) を満たす最小の次数 k ∈ S。

    該当なしなら None。p = inf は 1/p = 0 として扱う。
    """
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    if not s > max(inv_p - 0.5, 0.0):
        return None
    for k in sorted(degrees):
        if k >= 1 and s < min(k, k - 1 + inv_p):
            return k
    return None


def l2_transfer_bound(d_nH: float, F: float, sigma_upper: float) -> float:
    """
    clip 済み関数での ‖f − f₀‖ + |σ − σ₀| の上界 sqrt(3 C_F / 2) d_{n,H}。

    C_F = F² + 8σ̄²。
    """
    if d_nH < 0 or not F > 0 or not sigma_upper > 0:
        raise ValueError("need d_nH >= 0, F > 0 and sigma_upper > 0")
    c_f = F**2 + 8.0 * sigma_upper**2
    return math.sqrt(1.5 * c_f) * d_nH
