"""
步长最坏情况误差与规模扫描
对每个 (n, k) 在对数步长网格上取第 k 轮期望次优间隙的最小值
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from analytic_oracles import (
    half_curved_reshuffle_moments,
    incremental_iterate_exact,
    reshuffle_second_moment,
    single_shuffle_second_moment,
    with_replacement_second_moment,
)
from quadratic_problem import (
    ConstructionKind,
    FiniteSumProblem,
    OrderPattern,
    make_construction,
    make_random_instance,
    recommended_start,
)
from sgd_engine import MAX_ENUMERATION_N, SamplingScheme, exact_moments, final_iterates

logger = logging.getLogger(__name__)

DEFAULT_ETA_POINTS = 200
# 超过该值的误差按发散处理
ERROR_CEILING = 1e300

SWEEP_COLUMNS = ['scheme', 'construction', 'estimator', 'axis', 'axis_value',
                 'n', 'k', 'eta_star', 'error_star']


class EstimatorKind(str, Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"


class SweepAxis(str, Enum):
    """扫描轴，nk 表示固定 n 改变 k、以 n·k 为横坐标"""

    N = "n"
    K = "k"
    NK = "nk"


# 有闭式的 (构造, 方案) 组合
CLOSED_FORMS = {
    (ConstructionKind.SIGNED_LINEAR, SamplingScheme.RANDOM_RESHUFFLE),
    (ConstructionKind.SIGNED_LINEAR, SamplingScheme.SINGLE_SHUFFLE),
    (ConstructionKind.SIGNED_LINEAR, SamplingScheme.WITH_REPLACEMENT),
    (ConstructionKind.HALF_CURVED, SamplingScheme.RANDOM_RESHUFFLE),
    (ConstructionKind.CYCLIC_SPLIT, SamplingScheme.INCREMENTAL),
}


def exact_available(kind: ConstructionKind, scheme: SamplingScheme, n: int) -> bool:
    """闭式存在，或方案确定，或 n 小到可以完全枚举"""
    scheme = SamplingScheme(scheme)
    if (ConstructionKind(kind), scheme) in CLOSED_FORMS:
        return True
    return scheme is SamplingScheme.INCREMENTAL or n <= MAX_ENUMERATION_N


@dataclass(frozen=True)
class SweepSpec:
    """
    一次规模扫描的全部参数

    instance_seed 不为 None 时使用随机实例（忽略 constructions）；
    constructions 含多个构造时，误差为各构造误差之和（可分离目标，各坐标共享调度）。
    refine 为真且使用精确估计器时，网格最小点再在相邻网格点之间按 log η 做有界一维搜索。
    """

    scheme: SamplingScheme
    axis: SweepAxis
    axis_values: Tuple[int, ...]
    n: int = 8
    k: int = 16
    constructions: Tuple[ConstructionKind, ...] = (ConstructionKind.SIGNED_LINEAR,)
    instance_seed: Optional[int] = None
    G: float = 6.0
    lam: float = 1.0
    L: Optional[float] = None
    x0: Optional[float] = None
    order: OrderPattern = OrderPattern.BLOCK_HALVES
    estimator: EstimatorKind = EstimatorKind.EXACT
    trials: int = 10_000
    seed: int = 0
    workers: int = 1
    eta_points: int = DEFAULT_ETA_POINTS
    eta_min: Optional[float] = None
    eta_max: Optional[float] = None
    refine: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'scheme', SamplingScheme(self.scheme))
        object.__setattr__(self, 'axis', SweepAxis(self.axis))
        object.__setattr__(self, 'estimator', EstimatorKind(self.estimator))
        object.__setattr__(self, 'constructions',
                           tuple(ConstructionKind(c) for c in self.constructions))
        object.__setattr__(self, 'axis_values', tuple(int(v) for v in self.axis_values))
        if not self.axis_values:
            raise ValueError("扫描轴取值不能为空")
        if not self.constructions and self.instance_seed is None:
            raise ValueError("至少需要一个构造或随机实例种子")
        if not self.lam > 0:
            raise ValueError(f"强凸参数 λ 必须为正，当前 λ={self.lam}")
        if self.G < 0:
            raise ValueError(f"梯度方差尺度 G 不能为负，当前 G={self.G}")
        if self.eta_points < 1:
            raise ValueError(f"步长网格至少需要 1 个点，当前 eta_points={self.eta_points}")
        if self.estimator is EstimatorKind.EXACT:
            for n, _ in self.points():
                if self.instance_seed is not None:
                    # 随机实例没有闭式
                    if self.scheme is not SamplingScheme.INCREMENTAL and n > MAX_ENUMERATION_N:
                        raise ValueError(
                            f"随机实例的精确估计要求 n ≤ {MAX_ENUMERATION_N}，当前 n={n}，请改用 monte_carlo")
                    continue
                for kind in self.constructions:
                    if not exact_available(kind, self.scheme, n):
                        raise ValueError(
                            f"精确估计器不支持 {kind.value} × {self.scheme.value} (n={n})，"
                            f"请改用 monte_carlo")

    def points(self) -> List[Tuple[int, int]]:
        """扫描点 (n, k) 列表"""
        if self.axis is SweepAxis.N:
            return [(v, self.k) for v in self.axis_values]
        return [(self.n, v) for v in self.axis_values]

    def axis_value(self, n: int, k: int) -> int:
        if self.axis is SweepAxis.N:
            return n
        if self.axis is SweepAxis.K:
            return k
        return n * k

    def label(self) -> str:
        if self.instance_seed is not None:
            return f"random_{self.instance_seed}"
        return '+'.join(c.value for c in self.constructions)


@dataclass
class StepsizeMinimum:
    """步长网格上的最小误差"""

    eta_star: float
    error_star: float
    etas: np.ndarray = field(repr=False)
    errors: np.ndarray = field(repr=False)

    @property
    def all_diverged(self) -> bool:
        return not np.isfinite(self.error_star)


@dataclass
class SweepPoint:
    axis_value: int
    n: int
    k: int
    eta_star: float
    error_star: float


@dataclass
class SweepResult:
    """扫描结果，按扫描轴顺序排列"""

    spec: SweepSpec
    points: List[SweepPoint]

    def frame(self) -> pd.DataFrame:
        rows = [{
            'scheme': self.spec.scheme.value,
            'construction': self.spec.label(),
            'estimator': self.spec.estimator.value,
            'axis': self.spec.axis.value,
            'axis_value': pt.axis_value,
            'n': pt.n,
            'k': pt.k,
            'eta_star': pt.eta_star,
            'error_star': pt.error_star,
        } for pt in self.points]
        return pd.DataFrame(rows, columns=SWEEP_COLUMNS)

    @property
    def axis_values(self) -> np.ndarray:
        return np.array([pt.axis_value for pt in self.points], dtype=float)

    @property
    def errors(self) -> np.ndarray:
        return np.array([pt.error_star for pt in self.points], dtype=float)


def default_eta_grid(n: int, lam: float, points: int = DEFAULT_ETA_POINTS,
                     eta_min: Optional[float] = None, eta_max: Optional[float] = None) -> np.ndarray:
    """
    对数等距步长网格，缺省覆盖 [10⁻⁶/(λn²), 10/λ]

    Args:
        n (int): 分量个数
        lam (float): λ
        points (int): 网格点数
        eta_min (Optional[float]): 下端
        eta_max (Optional[float]): 上端

    Returns:
        np.ndarray: 升序网格
    """
    low = 1e-6 / (lam * n * n) if eta_min is None else float(eta_min)
    high = 10.0 / lam if eta_max is None else float(eta_max)
    if not 0 < low <= high:
        raise ValueError(f"步长网格端点无效: [{low}, {high}]")
    if points == 1:
        return np.array([low])
    return np.geomspace(low, high, points)


def _problem(spec: SweepSpec, kind: Optional[ConstructionKind], n: int) -> FiniteSumProblem:
    if kind is None:
        L = spec.lam if spec.L is None else spec.L
        return make_random_instance(n, spec.lam, L, spec.G, spec.instance_seed)
    return make_construction(kind, n, spec.G, spec.lam, spec.order)


def _closed_form_error(kind: ConstructionKind, scheme: SamplingScheme, n: int, k: int,
                       eta: float, spec: SweepSpec, x0: float) -> float:
    G, lam = spec.G, spec.lam
    if kind is ConstructionKind.SIGNED_LINEAR:
        if scheme is SamplingScheme.RANDOM_RESHUFFLE:
            second = reshuffle_second_moment(n, k, eta, lam, G, x0)
        elif scheme is SamplingScheme.SINGLE_SHUFFLE:
            second = single_shuffle_second_moment(n, k, eta, lam, G, x0)
        else:
            second = with_replacement_second_moment(n, k, eta, lam, G, x0)
        return 0.5 * lam * second
    if kind is ConstructionKind.HALF_CURVED:
        # F = (λ/4)x²
        return 0.25 * lam * half_curved_reshuffle_moments(n, k, eta, lam, G, x0)[1]
    x_k = incremental_iterate_exact(n, k, eta, lam, G, x0)
    return 0.5 * lam * x_k * x_k


def _exact_errors(spec: SweepSpec, n: int, k: int, etas: np.ndarray) -> np.ndarray:
    kinds = [None] if spec.instance_seed is not None else list(spec.constructions)
    total = np.zeros(etas.size)
    for kind in kinds:
        closed = kind is not None and (kind, spec.scheme) in CLOSED_FORMS
        # 闭式只对块状排布推导，交替排布对可交换方案没有区别
        if closed and kind is ConstructionKind.CYCLIC_SPLIT and spec.order is not OrderPattern.BLOCK_HALVES:
            closed = False
        # 闭式路径不构造问题，G = 0 时同样可用
        if closed:
            p = None
            x0 = recommended_start(kind) if spec.x0 is None else spec.x0
        else:
            p = _problem(spec, kind, n)
            x0 = p.recommended_x0 if spec.x0 is None else spec.x0
        with np.errstate(over='ignore', invalid='ignore'):
            for j, eta in enumerate(etas):
                if closed:
                    total[j] += _closed_form_error(kind, spec.scheme, n, k, float(eta), spec, x0)
                else:
                    total[j] += exact_moments(p, spec.scheme, float(eta), k, x0).mean_subopt
    return total


def _monte_carlo_errors(spec: SweepSpec, n: int, k: int, etas: np.ndarray) -> np.ndarray:
    kinds = [None] if spec.instance_seed is not None else list(spec.constructions)
    total = np.zeros(etas.size)
    trials = 1 if spec.scheme is SamplingScheme.INCREMENTAL else spec.trials
    for kind in kinds:
        p = _problem(spec, kind, n)
        x0 = p.recommended_x0 if spec.x0 is None else spec.x0
        xs = final_iterates(p, spec.scheme, etas, k, trials, spec.seed, x0=x0, workers=spec.workers)
        dev = xs - p.x_star
        with np.errstate(over='ignore', invalid='ignore'):
            total += np.mean(0.5 * p.lambda_ * dev * dev, axis=1)
    return total


def epoch_errors(spec: SweepSpec, n: int, k: int, etas: Sequence[float]) -> np.ndarray:
    """
    网格上每个步长的第 k 轮期望次优间隙，发散记为 +inf

    Args:
        spec (SweepSpec): 扫描参数
        n (int): 分量个数
        k (int): 轮数
        etas (Sequence[float]): 步长

    Returns:
        np.ndarray: 与 etas 等长的误差
    """
    etas = np.asarray(etas, dtype=float)
    if spec.estimator is EstimatorKind.EXACT:
        errors = _exact_errors(spec, n, k, etas)
    else:
        errors = _monte_carlo_errors(spec, n, k, etas)
    errors = np.where(np.isfinite(errors) & (errors < ERROR_CEILING), errors, np.inf)
    return errors


def min_over_stepsize(spec: SweepSpec, n: int, k: int) -> StepsizeMinimum:
    """
    步长网格上的最坏情况（最小）误差

    Args:
        spec (SweepSpec): 扫描参数，网格由 eta_points/eta_min/eta_max 决定
        n (int): 分量个数
        k (int): 轮数

    Returns:
        StepsizeMinimum: 并列时取较小的步长；全部发散时 error_star = inf、eta_star = nan；
            refine 时 eta_star/error_star 为细化后的值，etas/errors 仍是原网格
    """
    etas = default_eta_grid(n, spec.lam, spec.eta_points, spec.eta_min, spec.eta_max)
    errors = epoch_errors(spec, n, k, etas)
    if not np.any(np.isfinite(errors)):
        logger.warning("all %d step sizes diverged (scheme=%s, n=%d, k=%d)",
                       etas.size, spec.scheme.value, n, k)
        return StepsizeMinimum(eta_star=float('nan'), error_star=float('inf'), etas=etas, errors=errors)
    # 网格升序，argmin 取第一个最小值
    j = int(np.argmin(errors))
    eta_star, error_star = float(etas[j]), float(errors[j])
    if spec.refine and spec.estimator is EstimatorKind.EXACT and 0 < j < etas.size - 1:
        eta_star, error_star = _refine_minimum(spec, n, k, etas[j - 1], etas[j + 1], eta_star, error_star)
    return StepsizeMinimum(eta_star=eta_star, error_star=error_star, etas=etas, errors=errors)


def _refine_minimum(spec: SweepSpec, n: int, k: int, low: float, high: float,
                    eta_star: float, error_star: float) -> Tuple[float, float]:
    """在 [low, high] 内按 log η 有界搜索，结果更小时才替换网格最小点"""

    def objective(log_eta: float) -> float:
        value = float(epoch_errors(spec, n, k, [np.exp(log_eta)])[0])
        return value if np.isfinite(value) else ERROR_CEILING

    result = minimize_scalar(objective, bounds=(np.log(low), np.log(high)), method='bounded',
                             options={'xatol': 1e-6})
    if result.fun < error_star:
        logger.debug("refined eta* %.6g -> %.6g (n=%d, k=%d)", eta_star, np.exp(result.x), n, k)
        return float(np.exp(result.x)), float(result.fun)
    return eta_star, error_star


def scaling_sweep(spec: SweepSpec) -> SweepResult:
    """
    沿扫描轴逐点求最坏情况误差

    Args:
        spec (SweepSpec): 扫描参数

    Returns:
        SweepResult: 每个轴取值一行
    """
    points = []
    for n, k in spec.points():
        best = min_over_stepsize(spec, n, k)
        logger.info("sweep %s %s n=%d k=%d: error*=%.6g at eta*=%.6g",
                    spec.scheme.value, spec.label(), n, k, best.error_star, best.eta_star)
        points.append(SweepPoint(axis_value=spec.axis_value(n, k), n=n, k=k,
                                 eta_star=best.eta_star, error_star=best.error_star))
    return SweepResult(spec=spec, points=points)
