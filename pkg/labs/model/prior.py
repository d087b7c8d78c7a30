from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from labs.core.errors import LabsError
from labs.schemas.config import HyperParams, PhiMode
from labs.splines.basis import KnotVector

from .state import LabsState

logger = logging.getLogger(__name__)

# 棄却サンプリングを諦めてギャップ変換に切り替えるまでの試行回数
MAX_REJECTION_TRIES = 64


class InvalidSampleSizeError(LabsError, ValueError):
    """スケジュールを決める標本サイズが2未満のとき。"""


class InfeasibleSpacingError(LabsError, ValueError):
    """最小間隔 δ を満たすノット列が存在しないとき。"""


@dataclass(frozen=True, slots=True)
class Schedule:
    """標本サイズ n に応じたハイパーパラメータ (b_n, φ_n, δ_n)。"""

    n: int
    b_n: float
    phi_n: float
    delta_n: float
    A: float = 0.0

    @property
    def knot_domain(self) -> tuple[float, float]:
        return (-self.A, 1.0 + self.A)


def schedule(n: int, hp: HyperParams) -> Schedule:
    """
    b_n = exp(C_b (log n)²)、δ_n = exp(−C_δ (log n)²) と φ_n を求める。

    φ_n は phi_mode=table なら C_φ log n、theory なら exp(C_φ (log n)²)。
    """
    if n < 2:
        raise InvalidSampleSizeError(f"schedule needs n >= 2, got {n}")
    log_n = math.log(n)
    b_n = math.exp(hp.C_b * log_n**2)
    delta_n = math.exp(-hp.C_delta * log_n**2)
    if hp.phi_mode is PhiMode.theory:
        phi_n = math.exp(hp.C_phi * log_n**2)
    else:
        phi_n = hp.C_phi * log_n
    return Schedule(n=n, b_n=b_n, phi_n=phi_n, delta_n=delta_n, A=hp.A)


# --- constrained uniform knots ---


def _check_spacing(k: int, delta: float, A: float) -> float:
    length = 1.0 + 2.0 * A
    if not delta > 0:
        raise InfeasibleSpacingError("delta must be positive")
    if (k + 1) * delta >= length:
        raise InfeasibleSpacingError(f"no knot vector of degree {k} fits spacing {delta} in a domain of length {length}")
    return length


def knot_log_density(k: int, delta: float, A: float) -> float:
    """
    ソート済みノット列の一様密度 log (k+2)! − (k+2) log(1+2A−(k+1)δ)。

    制約集合 𝒳^{k+2}(δ) の体積は (1+2A−(k+1)δ)^{k+2}/(k+2)!。
    """
    length = _check_spacing(k, delta, A)
    m = k + 2
    return math.lgamma(m + 1) - m * math.log(length - (m - 1) * delta)


def sample_knots(k: int, delta: float, A: float, rng: np.random.Generator) -> KnotVector:
    """
    U([−A, 1+A]) から k+2 点を引き、最小間隔 δ 以上なら採用する。

    棄却が続く場合は同じ分布を与えるギャップ変換
    (長さ L−(k+1)δ の区間の順序統計量に jδ を足す) で引く。
    """
    length = _check_spacing(k, delta, A)
    m = k + 2
    for _ in range(MAX_REJECTION_TRIES):
        draws = np.sort(rng.uniform(-A, 1.0 + A, size=m))
        if np.min(np.diff(draws)) >= delta:
            return KnotVector(degree=k, knots=tuple(draws))
    logger.debug("Knot rejection sampling exhausted for k=%s delta=%s; using gap transform.", k, delta)
    base = np.sort(rng.uniform(0.0, length - (m - 1) * delta, size=m))
    knots = np.minimum(base + delta * np.arange(m) - A, 1.0 + A)
    return KnotVector(degree=k, knots=tuple(knots))


# --- log densities ---


def log_invgamma(x: float, shape: float, scale: float) -> float:
    return shape * math.log(scale) - math.lgamma(shape) - (shape + 1.0) * math.log(x) - scale / x


def log_gamma_rate(x: float, shape: float, rate: float) -> float:
    return shape * math.log(rate) - math.lgamma(shape) + (shape - 1.0) * math.log(x) - rate * x


def log_poisson(j: int, mean: float) -> float:
    return j * math.log(mean) - mean - math.lgamma(j + 1)


def log_normal(x: float, scale: float) -> float:
    return -0.5 * math.log(2.0 * math.pi) - math.log(scale) - 0.5 * (x / scale) ** 2


def invgamma_mass(shape: float, scale: float, bounds: tuple[float, float]) -> float:
    """Inv-Gam(shape, scale) の区間 [lo, hi] の確率。"""
    lo, hi = bounds
    # P(X <= x) = Q(shape, scale/x)
    return float(gammaincc(shape, scale / hi) - gammaincc(shape, scale / lo))


def support_violations(state: LabsState, hp: HyperParams, sch: Schedule) -> list[str]:
    """状態が事前分布の台の外にある理由をすべて返す。空リストなら台の内側。"""
    problems: list[str] = []
    if not (math.isfinite(state.sigma2) and state.sigma2 > 0):
        problems.append(f"sigma2 must be positive, got {state.sigma2}")
    elif hp.sigma2_bounds is not None:
        lo, hi = hp.sigma2_bounds
        if not lo <= state.sigma2 <= hi:
            problems.append(f"sigma2={state.sigma2} outside [{lo}, {hi}]")

    allowed = set(hp.degrees)
    for k in state.degrees:
        if k not in allowed:
            problems.append(f"degree {k} not in S={sorted(allowed)}")
    for k in hp.degrees:
        m_k = state.M.get(k)
        if m_k is None or not (math.isfinite(m_k) and m_k > 0):
            problems.append(f"M_{k} must be positive, got {m_k}")

    lo_dom, hi_dom = sch.knot_domain
    for k, index, atom in state.iter_atoms():
        kv = atom.knotvec
        if kv.degree != k:
            problems.append(f"atom {k}:{index} has degree {kv.degree}")
        if kv.left < lo_dom or kv.right > hi_dom:
            problems.append(f"atom {k}:{index} knots outside [{lo_dom}, {hi_dom}]")
        if kv.min_spacing < sch.delta_n:
            problems.append(f"atom {k}:{index} min spacing {kv.min_spacing} < delta_n={sch.delta_n}")
    return problems


def log_prior(state: LabsState, hp: HyperParams, sch: Schedule) -> float:
    """
    階層事前分布の対数密度。

    σ² ~ Inv-Gam(r/2, rR/2)、M_k ~ Gam(a_k, b_n)、J_k ~ Poisson(M_k)、
    β ~ N(0, φ_n²)、ξ ~ U(𝒳^{k+2}(δ_n))。台の外なら −inf。
    """
    problems = support_violations(state, hp, sch)
    if problems:
        logger.debug("State outside prior support: %s", "; ".join(problems))
        return -math.inf

    shape, scale = hp.r / 2.0, hp.r * hp.R / 2.0
    total = log_invgamma(state.sigma2, shape, scale)
    if hp.sigma2_bounds is not None:
        total -= math.log(invgamma_mass(shape, scale, hp.sigma2_bounds))

    for k in hp.degrees:
        m_k = state.M[k]
        j_k = state.count(k)
        total += log_gamma_rate(m_k, hp.gamma_shape(k), sch.b_n)
        total += log_poisson(j_k, m_k)
        if j_k:
            total += j_k * knot_log_density(k, sch.delta_n, sch.A)
            total += sum(log_normal(atom.coefficient, sch.phi_n) for atom in state.atoms[k])
    return total
