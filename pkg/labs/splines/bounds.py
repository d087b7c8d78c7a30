from __future__ import annotations

from labs.core.errors import LabsError


class BoundInapplicableError(LabsError, ValueError):
    """ノット摂動のリプシッツ評価が前提条件の外で要求されたとき。"""


def lipschitz_bound(
    B: float,
    J_total: int,
    delta: float,
    k_max: int,
    s_card: int,
    A: float = 0.0,
) -> float:
    """
    ノット摂動に対する sup ノルムのリプシッツ定数
    L = 4|S|(1+2A)^k̄ (k̄+2) B J (δ∧1)^{-(k̄+1)} を返す。

    係数が |β| <= B、各ノット列の最小間隔が δ 以上の関数同士で
    ‖f_{β,ξ} − f_{β,ξ'}‖_∞ <= L ‖ξ − ξ'‖_∞ が成り立つ。
    """
    if B <= 0 or delta <= 0:
        raise BoundInapplicableError("B and delta must be positive")
    if J_total < 1 or s_card < 1:
        raise BoundInapplicableError("J_total and s_card must be at least 1")
    if k_max < 1:
        raise BoundInapplicableError("the knot-perturbation bound needs continuous splines (k_max >= 1)")
    if A < 0:
        raise BoundInapplicableError("domain extension A must be nonnegative")
    if delta > 2.0 * (1.0 + 2.0 * A) / k_max:
        raise BoundInapplicableError(f"delta={delta} exceeds 2(1+2A)/k_max={2.0 * (1.0 + 2.0 * A) / k_max}")

    return (
        4.0
        * s_card
        * (1.0 + 2.0 * A) ** k_max
        * (k_max + 2)
        * B
        * J_total
        * min(delta, 1.0) ** (-(k_max + 1))
    )


def coefficient_knot_bound(
    B: float,
    J_total: int,
    delta: float,
    k_max: int,
    s_card: int,
    A: float,
    *,
    beta_shift: float,
    knot_shift: float,
) -> float:
    """係数とノットを同時に動かしたときの上界 J‖Δβ‖_∞ + L‖Δξ‖_∞。"""
    if beta_shift < 0 or knot_shift < 0:
        raise BoundInapplicableError("perturbation sizes must be nonnegative")
    return J_total * beta_shift + lipschitz_bound(B, J_total, delta, k_max, s_card, A) * knot_shift
