from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from labs.core.errors import LabsError
from labs.model.likelihood import gaussian_log_likelihood
from labs.model.prior import InvalidSampleSizeError, Schedule, log_prior, sample_knots, schedule
from labs.model.state import LabsState
from labs.schemas.config import ChainConfig, HyperParams
from labs.splines.basis import SplineAtom, bspline_basis, function_values
from labs.testbed.data import Dataset

from .gibbs import ConditioningError, gibbs_beta_joint, gibbs_M, gibbs_sigma2
from .moves import MoveKind, birth_log_ratio, choose_move, death_log_ratio, metropolis_accept, update_move

logger = logging.getLogger(__name__)

# Robbins–Monro のステップ幅 γ_t = (t+1)^{-ADAPT_EXPONENT}
ADAPT_EXPONENT = 0.6
# 同時係数更新を使わないときの残差再計算の間隔
RESIDUAL_REFRESH_EVERY = 1000


class NoDrawsError(LabsError, ValueError):
    """保存済みドローが無いのに事後平均を求めたとき。"""


@dataclass(frozen=True, slots=True)
class TraceRow:
    iteration: int
    counts: dict[int, int]
    sigma2: float
    log_posterior: float
    moves: dict[int, tuple[MoveKind, bool]]


@dataclass
class ChainOutput:
    """run_chain の結果。間引き後のドロー、グリッド上の関数値、トレース、受理数。"""

    draws: list[LabsState]
    grid: np.ndarray
    grid_values: np.ndarray
    schedule: Schedule
    hyper: HyperParams
    config: ChainConfig
    trace: list[TraceRow] = field(default_factory=list)
    proposed: dict[MoveKind, int] = field(default_factory=dict)
    accepted: dict[MoveKind, int] = field(default_factory=dict)
    scales: dict[int, tuple[float, float]] = field(default_factory=dict)
    skipped_joint: int = 0

    @property
    def acceptance(self) -> dict[str, float]:
        """move 種別ごとの受理率（提案が無ければ nan）。"""
        rates = {}
        for kind in MoveKind:
            proposed = self.proposed.get(kind, 0)
            rates[kind.value] = self.accepted.get(kind, 0) / proposed if proposed else math.nan
        return rates

    @property
    def degrees(self) -> list[int]:
        return list(self.hyper.degrees)

    def sigma2_draws(self) -> np.ndarray:
        return np.array([state.sigma2 for state in self.draws], dtype=float)

    def count_draws(self, degree: int) -> np.ndarray:
        return np.array([state.count(degree) for state in self.draws], dtype=float)

    def M_draws(self, degree: int) -> np.ndarray:
        return np.array([state.M[degree] for state in self.draws], dtype=float)

    def J_total_draws(self) -> np.ndarray:
        return np.array([state.J_total for state in self.draws], dtype=float)


class _Workspace:
    """現在の状態と、atom ごとの基底列・残差ベクトルのキャッシュ。"""

    def __init__(self, state: LabsState, data: Dataset) -> None:
        self.data = data
        self.state = state
        self.refresh()

    def refresh(self) -> None:
        xs = self.data.xs
        self.columns = {k: [bspline_basis(xs, atom.knotvec) for atom in atoms] for k, atoms in self.state.atoms.items()}
        fitted = np.zeros(self.data.n)
        for k, atoms in self.state.atoms.items():
            for atom, column in zip(atoms, self.columns[k], strict=True):
                fitted += atom.coefficient * column
        self.resid = self.data.ys - fitted

    @property
    def rss(self) -> float:
        return float(self.resid @ self.resid)

    def design(self) -> np.ndarray:
        ordered = [column for k in sorted(self.columns) for column in self.columns[k]]
        return np.column_stack(ordered).reshape(self.data.n, len(ordered))


def _initial_state(data: Dataset, hp: HyperParams, sch: Schedule) -> LabsState:
    sigma2 = float(np.var(data.ys)) if data.n > 1 else 0.0
    if not sigma2 > 0:
        sigma2 = hp.R
    if hp.sigma2_bounds is not None:
        sigma2 = min(max(sigma2, hp.sigma2_bounds[0]), hp.sigma2_bounds[1])
    M = {k: hp.gamma_shape(k) / sch.b_n for k in hp.degrees}
    return LabsState.empty(hp.degrees, M, sigma2)


def default_scales(data: Dataset, hp: HyperParams, sch: Schedule, config: ChainConfig) -> tuple[float, float]:
    """s_beta = 0.25·min(φ_n, sd(y))、s_knot = 0.05·(1+2A)。設定値があればそちらを使う。"""
    if config.s_beta is not None:
        s_beta = config.s_beta
    else:
        sd_y = float(np.std(data.ys)) if data.n > 1 else 0.0
        s_beta = 0.25 * min(sch.phi_n, sd_y if sd_y > 0 else 1.0)
    s_knot = config.s_knot if config.s_knot is not None else 0.05 * hp.domain_length
    return s_beta, s_knot


def _birth(ws: _Workspace, k: int, sch: Schedule, config: ChainConfig, rng: np.random.Generator) -> bool:
    if config.max_atoms is not None and ws.state.count(k) >= config.max_atoms:
        return False
    knotvec = sample_knots(k, sch.delta_n, sch.A, rng)
    atom = SplineAtom(knotvec=knotvec, coefficient=sch.phi_n * rng.standard_normal())
    column = bspline_basis(ws.data.xs, knotvec)
    log_ratio = birth_log_ratio(ws.state, k, atom, ws.data, sch, config.move_probs, resid=ws.resid, column=column)
    if not metropolis_accept(log_ratio, rng):
        return False
    ws.state = ws.state.add_atom(k, atom)
    ws.columns.setdefault(k, []).append(column)
    ws.resid = ws.resid - atom.coefficient * column
    return True


def _death(ws: _Workspace, k: int, sch: Schedule, config: ChainConfig, rng: np.random.Generator) -> bool:
    index = int(rng.integers(ws.state.count(k)))
    column = ws.columns[k][index]
    log_ratio = death_log_ratio(ws.state, k, index, ws.data, sch, config.move_probs, resid=ws.resid, column=column)
    if not metropolis_accept(log_ratio, rng):
        return False
    coefficient = ws.state.atoms[k][index].coefficient
    ws.state = ws.state.remove_atom(k, index)
    del ws.columns[k][index]
    ws.resid = ws.resid + coefficient * column
    return True


def _update(
    ws: _Workspace, k: int, sch: Schedule, scales: tuple[float, float], rng: np.random.Generator
) -> bool:
    index = int(rng.integers(ws.state.count(k)))
    result = update_move(
        ws.state, k, index, ws.data, sch, scales, rng, resid=ws.resid, column=ws.columns[k][index]
    )
    if not result.accepted:
        return False
    ws.state = result.state
    if result.column is not None:
        ws.columns[k][index] = result.column
        ws.resid = result.resid
    return True


def run_chain(data: Dataset, hp: HyperParams, config: ChainConfig) -> ChainOutput:
    """
    可逆ジャンプMCMCを実行する。1スイープの順序は
    (1) 各次数で birth/death/update、(2) σ²、(3) 各 M_k、(4) joint_beta_every ごとに係数を同時更新。

    burn-in 後 thin スイープごとに状態を保存する。同じ seed なら結果は同一。
    """
    n = hp.n if hp.n is not None else data.n
    if n < 2:
        raise InvalidSampleSizeError(
            f"run_chain needs n >= 2 for the schedule, got n={n}; set hyper.n for data-free runs"
        )
    sch = schedule(n, hp)
    rng = np.random.default_rng(config.seed)
    grid = np.linspace(0.0, 1.0, config.grid_points)
    base_scales = default_scales(data, hp, sch, config)
    log_factor = {k: 0.0 for k in hp.degrees}

    ws = _Workspace(_initial_state(data, hp, sch), data)
    proposed = {kind: 0 for kind in MoveKind}
    accepted = {kind: 0 for kind in MoveKind}
    draws: list[LabsState] = []
    grid_values: list[np.ndarray] = []
    trace: list[TraceRow] = []
    skipped_joint = 0

    logger.info(
        "Starting chain: n=%s degrees=%s iterations=%s burn_in=%s thin=%s seed=%s",
        data.n,
        hp.degrees,
        config.iterations,
        config.burn_in,
        config.thin,
        config.seed,
    )
    for iteration in range(config.iterations):
        burning = iteration < config.burn_in
        sweep_moves: dict[int, tuple[MoveKind, bool]] = {}

        for k in hp.degrees:
            kind = choose_move(ws.state.count(k), config.move_probs, rng)
            if kind is MoveKind.birth:
                ok = _birth(ws, k, sch, config, rng)
            elif kind is MoveKind.death:
                ok = _death(ws, k, sch, config, rng)
            else:
                factor = math.exp(log_factor[k])
                ok = _update(ws, k, sch, (base_scales[0] * factor, base_scales[1] * factor), rng)
                if burning and config.adapt:
                    gain = (iteration + 1) ** -ADAPT_EXPONENT
                    log_factor[k] += gain * (float(ok) - config.target_accept)
            proposed[kind] += 1
            accepted[kind] += int(ok)
            sweep_moves[k] = (kind, ok)

        sigma2 = gibbs_sigma2(ws.state, data, hp.r, hp.R, rng, bounds=hp.sigma2_bounds, rss=ws.rss)
        state = ws.state.with_sigma2(sigma2)
        for k in hp.degrees:
            state = state.with_M(k, gibbs_M(state.count(k), hp.gamma_shape(k), sch.b_n, rng))
        ws.state = state

        if config.joint_beta_every and (iteration + 1) % config.joint_beta_every == 0 and ws.state.J_total:
            try:
                ws.state = gibbs_beta_joint(ws.state, data, sch, rng, design=ws.design())
            except ConditioningError:
                skipped_joint += 1
                logger.warning("Skipping joint coefficient sweep at iteration %s (ill-conditioned).", iteration)
            ws.refresh()
        elif (iteration + 1) % RESIDUAL_REFRESH_EVERY == 0:
            ws.refresh()

        if config.record_trace:
            log_post = log_prior(ws.state, hp, sch) + gaussian_log_likelihood(ws.rss, data.n, ws.state.sigma2)
            trace.append(
                TraceRow(
                    iteration=iteration,
                    counts={k: ws.state.count(k) for k in hp.degrees},
                    sigma2=ws.state.sigma2,
                    log_posterior=log_post,
                    moves=sweep_moves,
                )
            )

        if not burning and (iteration - config.burn_in + 1) % config.thin == 0:
            draws.append(ws.state)
            grid_values.append(function_values(ws.state.all_atoms(), grid))

    final_scales = {k: (base_scales[0] * math.exp(f), base_scales[1] * math.exp(f)) for k, f in log_factor.items()}
    output = ChainOutput(
        draws=draws,
        grid=grid,
        grid_values=np.vstack(grid_values) if grid_values else np.empty((0, grid.size)),
        schedule=sch,
        hyper=hp,
        config=config,
        trace=trace,
        proposed=proposed,
        accepted=accepted,
        scales=final_scales,
        skipped_joint=skipped_joint,
    )
    logger.info("Chain finished: %s draws, acceptance=%s", len(draws), output.acceptance)
    return output


def posterior_mean(output: ChainOutput, grid: ArrayLike | None = None) -> np.ndarray:
    """保存済みドローの関数値の点ごとの平均。grid 省略時は output.grid。"""
    if not output.draws:
        raise NoDrawsError("posterior_mean needs at least one retained draw")
    if grid is None:
        return output.grid_values.mean(axis=0)
    xs = np.asarray(grid, dtype=float)
    total = np.zeros_like(xs, dtype=float)
    for state in output.draws:
        total += function_values(state.all_atoms(), xs)
    return total / len(output.draws)
