from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from labs.model.likelihood import residuals
from labs.model.prior import Schedule, log_normal
from labs.model.state import LabsState
from labs.splines.basis import KnotVector, SplineAtom, bspline_basis
from labs.testbed.data import Dataset

logger = logging.getLogger(__name__)


class MoveKind(str, Enum):
    birth = "birth"
    death = "death"
    update = "update"


@dataclass(frozen=True, slots=True)
class UpdateResult:
    """update_move の結果。受理されたときは新しい基底列と残差も返す。"""

    state: LabsState
    accepted: bool
    column: np.ndarray | None = None
    resid: np.ndarray | None = None


def effective_move_probs(J_k: int, move_probs: tuple[float, float, float]) -> tuple[float, float, float]:
    """J_k = 0 では death/update の確率を birth に寄せる。"""
    if J_k == 0:
        return (1.0, 0.0, 0.0)
    return move_probs


def choose_move(J_k: int, move_probs: tuple[float, float, float], rng: np.random.Generator) -> MoveKind:
    p_birth, p_death, _ = effective_move_probs(J_k, move_probs)
    u = rng.random()
    if u < p_birth:
        return MoveKind.birth
    if u < p_birth + p_death:
        return MoveKind.death
    return MoveKind.update


def metropolis_accept(log_ratio: float, rng: np.random.Generator) -> bool:
    if log_ratio >= 0.0:
        return True
    if math.isnan(log_ratio) or log_ratio == -math.inf:
        return False
    return bool(rng.random() < math.exp(log_ratio))


def _safe_log(value: float) -> float:
    return math.log(value) if value > 0 else -math.inf


def _delta_loglik(resid: np.ndarray, change: np.ndarray, sigma2: float) -> float:
    """残差が resid − change に変わったときの対数尤度の差。"""
    if resid.size == 0:
        return 0.0
    updated = resid - change
    return -(float(updated @ updated) - float(resid @ resid)) / (2.0 * sigma2)


def _in_support(kv: KnotVector, sch: Schedule) -> bool:
    lo, hi = sch.knot_domain
    return kv.left >= lo and kv.right <= hi and kv.min_spacing >= sch.delta_n


def birth_log_ratio(
    state: LabsState,
    k: int,
    new_atom: SplineAtom,
    data: Dataset,
    sch: Schedule,
    move_probs: tuple[float, float, float],
    *,
    resid: np.ndarray | None = None,
    column: np.ndarray | None = None,
) -> float:
    """
    次数 k への atom 追加の対数受理比
    Δloglik + log M_k − log(J_k+1) + log(p_death(J_k+1) / p_birth(J_k))。

    atom は事前分布から提案されるので事前密度と提案密度は打ち消し合う。
    """
    if not _in_support(new_atom.knotvec, sch):
        return -math.inf
    J_k = state.count(k)
    delta_ll = 0.0
    if data.n:
        if resid is None:
            resid = residuals(state, data)
        if column is None:
            column = bspline_basis(data.xs, new_atom.knotvec)
        delta_ll = _delta_loglik(resid, new_atom.coefficient * column, state.sigma2)
    p_birth = effective_move_probs(J_k, move_probs)[0]
    p_death = effective_move_probs(J_k + 1, move_probs)[1]
    return delta_ll + math.log(state.M[k]) - math.log(J_k + 1) + _safe_log(p_death) - _safe_log(p_birth)


def death_log_ratio(
    state: LabsState,
    k: int,
    atom_index: int,
    data: Dataset,
    sch: Schedule,
    move_probs: tuple[float, float, float],
    *,
    resid: np.ndarray | None = None,
    column: np.ndarray | None = None,
) -> float:
    """次数 k の atom 削除の対数受理比。birth_log_ratio の逆向き。"""
    J_k = state.count(k)
    if J_k == 0:
        raise ValueError(f"death move unavailable: degree {k} has no atoms")
    atom = state.atoms[k][atom_index]
    delta_ll = 0.0
    if data.n:
        if resid is None:
            resid = residuals(state, data)
        if column is None:
            column = bspline_basis(data.xs, atom.knotvec)
        delta_ll = _delta_loglik(resid, -atom.coefficient * column, state.sigma2)
    p_birth = effective_move_probs(J_k - 1, move_probs)[0]
    p_death = effective_move_probs(J_k, move_probs)[1]
    return delta_ll + math.log(J_k) - math.log(state.M[k]) + _safe_log(p_birth) - _safe_log(p_death)


def update_move(
    state: LabsState,
    k: int,
    atom_index: int,
    data: Dataset,
    sch: Schedule,
    scales: tuple[float, float],
    rng: np.random.Generator,
    *,
    resid: np.ndarray | None = None,
    column: np.ndarray | None = None,
) -> UpdateResult:
    """
    β と一様に選んだノット1つをランダムウォークで動かす Metropolis–Hastings 更新。

    順序・最小間隔・定義域を壊す提案は台の外として即棄却する。
    """
    s_beta, s_knot = scales
    atom = state.atoms[k][atom_index]
    kv = atom.knotvec
    beta_new = atom.coefficient + s_beta * rng.standard_normal()
    knot_index = int(rng.integers(kv.degree + 2))
    knot_new = kv.knots[knot_index] + s_knot * rng.standard_normal()

    lo, hi = sch.knot_domain
    knots = kv.knots
    outside = (
        not lo <= knot_new <= hi
        or (knot_index > 0 and knot_new - knots[knot_index - 1] < sch.delta_n)
        or (knot_index < len(knots) - 1 and knots[knot_index + 1] - knot_new < sch.delta_n)
    )
    if outside:
        logger.debug("Update proposal for atom %s:%s leaves the knot support.", k, atom_index)
        return UpdateResult(state=state, accepted=False)

    kv_new = kv.replace_knot(knot_index, knot_new) if knot_new != knots[knot_index] else kv
    new_atom = SplineAtom(knotvec=kv_new, coefficient=beta_new)

    new_column = None
    new_resid = None
    delta_ll = 0.0
    if data.n:
        if resid is None:
            resid = residuals(state, data)
        if column is None:
            column = bspline_basis(data.xs, kv)
        new_column = column if kv_new is kv else bspline_basis(data.xs, kv_new)
        change = beta_new * new_column - atom.coefficient * column
        delta_ll = _delta_loglik(resid, change, state.sigma2)
        new_resid = resid - change

    log_ratio = delta_ll + log_normal(beta_new, sch.phi_n) - log_normal(atom.coefficient, sch.phi_n)
    if not metropolis_accept(log_ratio, rng):
        return UpdateResult(state=state, accepted=False)
    return UpdateResult(
        state=state.replace_atom(k, atom_index, new_atom),
        accepted=True,
        column=new_column,
        resid=new_resid,
    )
