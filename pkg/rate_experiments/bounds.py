"""
下界公式与上界定理的数值验证
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from quadratic_problem import ConstructionKind, FiniteSumProblem, make_random_instance
from sgd_engine import MAX_ENUMERATION_N, SamplingScheme, estimate_suboptimality, exact_moments
from .sweeps import DEFAULT_ETA_POINTS, EstimatorKind, SweepAxis, SweepSpec, min_over_stepsize

logger = logging.getLogger(__name__)

# 下界比值在网格上的最大允许跨度
RATIO_SPREAD_LIMIT = 50.0
# 增量方法误差与 n 无关: 同一 k 上的相对极差上限
N_VARIATION_LIMIT = 0.05

BOUND_COLUMNS = ['kind', 'scheme', 'n', 'k', 'eta', 'observed', 'bound', 'ratio', 'verdict']


class HypothesisError(ValueError):
    """上界定理的前提不满足"""


@dataclass
class BoundPoint:
    n: int
    k: int
    eta: float
    observed: float
    bound: float
    ratio: float


@dataclass
class BoundReport:
    """
    一组 (n, k) 上观测误差与定理公式之比

    verdict 由 ratios 决定；增量方法的下界还要求同一 k 上误差随 n 的相对极差低于
    N_VARIATION_LIMIT。两者都可以从 frame() 的列重新计算，见 frame_verdict。
    """

    kind: str
    scheme: SamplingScheme
    points: List[BoundPoint]
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([p.ratio for p in self.points], dtype=float)

    @property
    def min_ratio(self) -> float:
        return float(np.min(self.ratios)) if self.points else float('nan')

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios)) if self.points else float('nan')

    @property
    def variations(self) -> Dict[int, float]:
        if self.kind != 'lower' or self.scheme is not SamplingScheme.INCREMENTAL:
            return {}
        return n_variation([p.k for p in self.points], [p.observed for p in self.points])

    @property
    def verdict(self) -> bool:
        variations = list(self.variations.values()) if self.variations else None
        return bound_verdict(self.kind, self.ratios, variations)

    def frame(self) -> pd.DataFrame:
        verdict = self.verdict
        rows = [{
            'kind': self.kind, 'scheme': self.scheme.value, 'n': p.n, 'k': p.k, 'eta': p.eta,
            'observed': p.observed, 'bound': p.bound, 'ratio': p.ratio, 'verdict': verdict,
        } for p in self.points]
        return pd.DataFrame(rows, columns=BOUND_COLUMNS)


def relative_spread(errors: Sequence[float]) -> float:
    """(max − min)/min，含非正或非有限值时为 inf"""
    values = np.asarray(errors, dtype=float)
    if values.size == 0 or not np.all(np.isfinite(values)) or not values.min() > 0:
        return float('inf')
    return float((values.max() - values.min()) / values.min())


def n_variation(ks: Sequence[int], observed: Sequence[float]) -> Dict[int, float]:
    """
    每个 k 上误差随 n 的相对极差

    Args:
        ks (Sequence[int]): 每个点的 k
        observed (Sequence[float]): 每个点的误差

    Returns:
        Dict[int, float]: 只含出现两个以上 n 的 k
    """
    groups: Dict[int, List[float]] = {}
    for k, value in zip(ks, observed):
        groups.setdefault(int(k), []).append(float(value))
    return {k: relative_spread(values) for k, values in sorted(groups.items()) if len(values) > 1}


def bound_verdict(kind: str, ratios: Sequence[float],
                  variations: Optional[Sequence[float]] = None) -> bool:
    """
    由比值重新计算结论

    Args:
        kind (str): 'lower' 要求最小比值 > 0 且最大/最小 < 50；'upper' 要求全部比值 ≤ 1
        ratios (Sequence[float]): 比值
        variations (Optional[Sequence[float]]): 增量方法下界另要求每个相对极差 < N_VARIATION_LIMIT

    Returns:
        bool: 是否通过
    """
    r = np.asarray(ratios, dtype=float)
    if r.size == 0 or not np.all(np.isfinite(r)):
        return False
    if kind == 'lower':
        low = float(r.min())
        if not (low > 0 and float(r.max()) / low < RATIO_SPREAD_LIMIT):
            return False
        return all(v < N_VARIATION_LIMIT for v in (variations or []))
    if kind == 'upper':
        return bool(np.all(r <= 1.0))
    raise ValueError(f"未知的界类型 '{kind}'，可选 lower / upper")


def frame_verdict(frame: pd.DataFrame) -> bool:
    """
    从 BOUND_COLUMNS 表格重新计算结论，结果文件读回后使用

    Args:
        frame (pd.DataFrame): BoundReport.frame() 或读回的 CSV

    Returns:
        bool: 与 BoundReport.verdict 相同
    """
    if frame.empty:
        return False
    kind = str(frame['kind'].iloc[0])
    variations = None
    if kind == 'lower' and SamplingScheme.parse(str(frame['scheme'].iloc[0])) is SamplingScheme.INCREMENTAL:
        variations = list(n_variation(frame['k'], frame['observed']).values())
    return bound_verdict(kind, frame['ratio'], variations)


def lower_bound_formula(scheme: SamplingScheme, n: int, k: int, G: float, lam: float) -> float:
    """
    下界定理中去掉常数 c 的公式

    Args:
        scheme (SamplingScheme): 采样方案
        n (int): 分量个数
        k (int): 轮数
        G (float): 梯度界
        lam (float): λ

    Returns:
        float: 随机重排 min{λ, G²/λ·(1/(nk)² + 1/(nk³))}，单次打乱 G²/(λnk²)，
        增量方法 min{λ, G²/(λk²)}
    """
    scheme = SamplingScheme(scheme)
    if scheme is SamplingScheme.RANDOM_RESHUFFLE:
        return min(lam, G * G / lam * (1.0 / (n * k) ** 2 + 1.0 / (n * k ** 3)))
    if scheme is SamplingScheme.SINGLE_SHUFFLE:
        return G * G / (lam * n * k * k)
    if scheme is SamplingScheme.INCREMENTAL:
        return min(lam, G * G / (lam * k * k))
    raise ValueError("有放回采样没有对应的下界构造，只作为基线参与速率表")


# 每个方案的下界构造，随机重排使用两个构造的可分离和
LOWER_BOUND_CONSTRUCTIONS = {
    SamplingScheme.RANDOM_RESHUFFLE: (ConstructionKind.SIGNED_LINEAR, ConstructionKind.HALF_CURVED),
    SamplingScheme.SINGLE_SHUFFLE: (ConstructionKind.SIGNED_LINEAR,),
    SamplingScheme.INCREMENTAL: (ConstructionKind.CYCLIC_SPLIT,),
}


def _ratio(observed: float, bound: float) -> float:
    if observed == 0:
        return 0.0
    if bound == 0:
        return float('inf')
    return observed / bound


def verify_lower_bound(scheme: SamplingScheme, grid: Sequence[Tuple[int, int]], G: float,
                       lam: float, eta_points: int = DEFAULT_ETA_POINTS) -> BoundReport:
    """
    用精确公式在 (n, k) 网格上测量下界常数

    Args:
        scheme (SamplingScheme): 随机重排、单次打乱或增量方法
        grid (Sequence[Tuple[int, int]]): (n, k) 列表
        G (float): 梯度界
        lam (float): λ
        eta_points (int): 步长网格点数

    Returns:
        BoundReport: ratio = 最坏步长误差 / 去掉 c 的公式；增量方法另在 extra['n_variation']
        中记录每个 k 上误差随 n 的相对极差，并计入结论
    """
    scheme = SamplingScheme(scheme)
    if scheme not in LOWER_BOUND_CONSTRUCTIONS:
        raise ValueError("有放回采样没有对应的下界构造，只作为基线参与速率表")

    points = []
    for n, k in grid:
        spec = SweepSpec(scheme=scheme, axis=SweepAxis.K, axis_values=(k,), n=n, k=k,
                         constructions=LOWER_BOUND_CONSTRUCTIONS[scheme], G=G, lam=lam,
                         estimator=EstimatorKind.EXACT, eta_points=eta_points, refine=True)
        best = min_over_stepsize(spec, n, k)
        bound = lower_bound_formula(scheme, n, k, G, lam)
        points.append(BoundPoint(n=int(n), k=int(k), eta=best.eta_star, observed=best.error_star,
                                 bound=bound, ratio=_ratio(best.error_star, bound)))

    report = BoundReport(kind='lower', scheme=scheme, points=points)
    if scheme is SamplingScheme.INCREMENTAL:
        report.extra['n_variation'] = report.variations
    logger.info("lower bound %s: ratios in [%.4g, %.4g], verdict %s",
                scheme.value, report.min_ratio, report.max_ratio, report.verdict)
    return report


def upper_bound_step_size(which: str, n: int, k: int, lam: float) -> float:
    """单次打乱 log(√n·k)/(λnk)，随机重排 log(nk)/(λnk)"""
    if which == 'single':
        return float(np.log(np.sqrt(n) * k) / (lam * n * k))
    if which == 'reshuffle':
        return float(np.log(n * k) / (lam * n * k))
    raise ValueError(f"未知的上界定理 '{which}'，可选 single / reshuffle")


def check_upper_bound_hypothesis(which: str, n: int, k: int, lam: float, L: float) -> None:
    """
    上界定理的条件数前提

    Raises:
        HypothesisError: 单次打乱要求 L/λ ≤ nk/log(√n·k)，随机重排要求 L/λ ≤ k/(2log(nk))
    """
    kappa = L / lam
    if which == 'single':
        limit = n * k / np.log(np.sqrt(n) * k)
        if not kappa <= limit:
            raise HypothesisError(f"单次打乱上界要求 L/λ ≤ nk/log(√n·k) = {limit:.6g}，当前 L/λ={kappa:.6g}")
    elif which == 'reshuffle':
        limit = k / (2.0 * np.log(n * k))
        if not kappa <= limit:
            raise HypothesisError(f"随机重排上界要求 L/λ ≤ k/(2log(nk)) = {limit:.6g}，当前 L/λ={kappa:.6g}")
    else:
        raise ValueError(f"未知的上界定理 '{which}'，可选 single / reshuffle")


def upper_bound_value(which: str, n: int, k: int, eta: float, lam: float, L: float, G: float,
                      x0_dist: float) -> float:
    """
    证明给出的显式上界

    单次打乱: (λ/2)[2(1−ηλ)^{2nk}x0² + 10η⁴n³k²G²L²log(2n)]
    随机重排: (λ/2)[2(1−ηλ)^{2nk}x0² + 12η⁴n²k²G²L² + 5η⁴n³kG²L²log(2n)]
    x0_dist 为 |x0 − x*|。
    """
    transient = 2.0 * (1.0 - eta * lam) ** (2 * n * k) * x0_dist * x0_dist
    noise_scale = eta ** 4 * G ** 2 * L ** 2
    if which == 'single':
        noise = 10.0 * noise_scale * n ** 3 * k ** 2 * np.log(2 * n)
    else:
        noise = 12.0 * noise_scale * n ** 2 * k ** 2 + 5.0 * noise_scale * n ** 3 * k * np.log(2 * n)
    return float(0.5 * lam * (transient + noise))


def verify_upper_bound(which: str, n: int, k: int, lam: float, L: float, G: float,
                       trials: int = 10_000, seed: int = 0, x0: float = 1.0,
                       problem: Optional[FiniteSumProblem] = None, workers: int = 1) -> BoundReport:
    """
    在随机实例上检查上界定理

    Args:
        which (str): 'single' 或 'reshuffle'
        n (int): 分量个数
        k (int): 轮数
        lam (float): λ
        L (float): 曲率上界
        G (float): 梯度界
        trials (int): n > 8 时的蒙特卡洛试验数
        seed (int): 实例与抽样种子
        x0 (float): 初始点
        problem (Optional[FiniteSumProblem]): 指定实例，此时 n、λ、L、G 取自实例
        workers (int): 蒙特卡洛进程数

    Returns:
        BoundReport: 单点报告，ratio = 观测误差 / 上界

    Raises:
        HypothesisError: 定理前提不满足
    """
    if problem is None:
        check_upper_bound_hypothesis(which, n, k, lam, L)
        problem = make_random_instance(n, lam, L, G, seed)
    else:
        n, lam, L, G = problem.n, problem.lambda_, problem.L, problem.G
        check_upper_bound_hypothesis(which, n, k, lam, L)

    scheme = SamplingScheme.SINGLE_SHUFFLE if which == 'single' else SamplingScheme.RANDOM_RESHUFFLE
    eta = upper_bound_step_size(which, n, k, lam)
    if n <= MAX_ENUMERATION_N:
        observed = exact_moments(problem, scheme, eta, k, x0).mean_subopt
    else:
        observed = estimate_suboptimality(problem, scheme, eta, k, trials, seed, x0=x0,
                                          workers=workers).mean_subopt
    bound = upper_bound_value(which, n, k, eta, lam, L, G, abs(x0 - problem.x_star))
    point = BoundPoint(n=int(n), k=int(k), eta=eta, observed=float(observed), bound=bound,
                       ratio=_ratio(float(observed), bound))
    report = BoundReport(kind='upper', scheme=scheme, points=[point],
                         extra={'seed': int(seed), 'exact': n <= MAX_ENUMERATION_N})
    logger.info("upper bound %s n=%d k=%d seed=%d: ratio %.4g", which, n, k, seed, point.ratio)
    return report


def merge_reports(reports: Sequence[BoundReport]) -> BoundReport:
    """同类报告合并为一份，用于多种子的上界检查"""
    if not reports:
        raise ValueError("没有可合并的报告")
    points = [p for r in reports for p in r.points]
    return BoundReport(kind=reports[0].kind, scheme=reports[0].scheme, points=points,
                       extra={'reports': len(reports)})


def separation_ratios(n: int, ks: Sequence[int], G: float, lam: float,
                      eta_points: int = DEFAULT_ETA_POINTS) -> pd.DataFrame:
    """
    SignedLinear 上单次打乱与随机重排的最坏步长误差之比

    Args:
        n (int): 分量个数
        ks (Sequence[int]): 轮数
        G (float): 梯度界
        lam (float): λ
        eta_points (int): 步长网格点数

    Returns:
        pd.DataFrame: 列为 n, k, error_single, error_reshuffle, ratio
    """
    rows = []
    for k in ks:
        errors = {}
        for scheme in (SamplingScheme.SINGLE_SHUFFLE, SamplingScheme.RANDOM_RESHUFFLE):
            spec = SweepSpec(scheme=scheme, axis=SweepAxis.K, axis_values=(k,), n=n, k=k, G=G,
                             lam=lam, eta_points=eta_points)
            errors[scheme] = min_over_stepsize(spec, n, k).error_star
        single = errors[SamplingScheme.SINGLE_SHUFFLE]
        reshuffle = errors[SamplingScheme.RANDOM_RESHUFFLE]
        rows.append({'n': int(n), 'k': int(k), 'error_single': single, 'error_reshuffle': reshuffle,
                     'ratio': single / reshuffle if reshuffle > 0 else float('inf')})
    return pd.DataFrame(rows, columns=['n', 'k', 'error_single', 'error_reshuffle', 'ratio'])
