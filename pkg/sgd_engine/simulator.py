"""
常数步长 SGD 模拟器
按调度逐步执行 x ← x − η(a_i x + b_i)，记录每轮结束时的迭代点
"""

import logging
from dataclasses import dataclass
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from quadratic_problem import FiniteSumProblem, suboptimality
from .schedules import (
    SamplingScheme,
    Schedule,
    all_permutations,
    schedule_indices,
    trial_generator,
)

logger = logging.getLogger(__name__)

# |x| 超过该阈值即视为发散
DIVERGENCE_THRESHOLD = 1e150
# 保留逐步轨迹的最大步数
MAX_TRACE_STEPS = 10_000
# 每个任务块的试验数，块划分固定，结果与并行度无关
TRIAL_CHUNK = 2048

TRAJECTORY_COLUMNS = ['scheme', 'n', 'k', 'eta', 'trial_or_exact', 'epoch', 'x', 'subopt']


@dataclass
class EpochTrajectory:
    """单条调度的轮末迭代点"""

    scheme: SamplingScheme
    n: int
    k: int
    eta: float
    x0: float
    epoch_iterates: np.ndarray
    diverged_epoch: Optional[int] = None
    trace: Optional[np.ndarray] = None

    @property
    def diverged(self) -> bool:
        return self.diverged_epoch is not None


@dataclass
class MomentEstimate:
    """第 k 轮迭代点的蒙特卡洛矩估计"""

    scheme: SamplingScheme
    n: int
    k: int
    eta: float
    mean_x: float
    mean_x_sq: float
    mean_subopt: float
    stderr_subopt: float
    stderr_x: float
    stderr_x_sq: float
    trials: int
    seed: int
    diverged: bool = False
    diverged_trials: int = 0


@dataclass
class ExactMoments:
    """对全部调度精确求期望的结果"""

    scheme: SamplingScheme
    n: int
    k: int
    eta: float
    mean_x: float
    mean_x_sq: float
    mean_subopt: float
    schedules: int

    @property
    def diverged(self) -> bool:
        return not np.isfinite(self.mean_x_sq)


def _check_eta(eta: float) -> None:
    if not eta > 0:
        raise ValueError(f"步长 η 必须为正，当前 η={eta}")


def _is_diverged(x) -> np.ndarray:
    return ~np.isfinite(x) | (np.abs(x) > DIVERGENCE_THRESHOLD)


def run_schedule(p: FiniteSumProblem, s: Schedule, eta: float, x0: Optional[float] = None,
                 keep_trace: bool = False) -> EpochTrajectory:
    """
    沿调度执行 SGD

    Args:
        p (FiniteSumProblem): 问题
        s (Schedule): 调度
        eta (float): 步长
        x0 (Optional[float]): 初始点，缺省为问题的推荐初始点
        keep_trace (bool): 是否保留逐步轨迹（n·k ≤ 10⁴）

    Returns:
        EpochTrajectory: 轮末迭代点，发散时记录发散轮次，其后的点为 inf
    """
    _check_eta(eta)
    if s.n != p.n:
        raise ValueError(f"调度的 n={s.n} 与问题的 n={p.n} 不一致")
    if keep_trace and s.n * s.k > MAX_TRACE_STEPS:
        raise ValueError(f"逐步轨迹只在 n·k ≤ {MAX_TRACE_STEPS} 时保留，当前 n·k={s.n * s.k}")

    x0 = p.recommended_x0 if x0 is None else float(x0)
    a = p.a.tolist()
    b = p.b.tolist()
    idx = s.zero_based().tolist()
    n = s.n

    epochs = np.full(s.k, np.inf)
    trace = np.full(n * s.k, np.inf) if keep_trace else None
    diverged_epoch = None
    x = x0
    for t in range(s.k):
        for step in range(t * n, (t + 1) * n):
            i = idx[step]
            x = x - eta * (a[i] * x + b[i])
            if trace is not None:
                trace[step] = x
        if not np.isfinite(x) or abs(x) > DIVERGENCE_THRESHOLD:
            diverged_epoch = t + 1
            logger.info("trajectory diverged at epoch %d (eta=%g, scheme=%s)", t + 1, eta, s.scheme.value)
            break
        epochs[t] = x

    return EpochTrajectory(scheme=s.scheme, n=n, k=s.k, eta=float(eta), x0=x0,
                           epoch_iterates=epochs, diverged_epoch=diverged_epoch, trace=trace)


def _simulate_chunk(args) -> np.ndarray:
    """一个试验块: 对整个步长网格同时推进，返回 (len(etas), 块大小) 的终点"""
    a, b, scheme, n, k, etas, x0, seed, start, stop = args
    idx = np.stack([schedule_indices(scheme, n, k, trial_generator(seed, t))
                    for t in range(start, stop)])
    eta_col = np.asarray(etas, dtype=float)[:, None]
    x = np.full((eta_col.shape[0], stop - start), float(x0))
    diverged = np.zeros(x.shape, dtype=bool)
    with np.errstate(over='ignore', invalid='ignore'):
        for step in range(n * k):
            j = idx[:, step]
            x = x - eta_col * (a[j] * x + b[j])
            if (step + 1) % n == 0:
                diverged |= _is_diverged(x)
    x[diverged] = np.inf
    return x


def final_iterates(p: FiniteSumProblem, scheme: SamplingScheme, etas: Sequence[float], k: int,
                   trials: int, seed: int, x0: Optional[float] = None,
                   workers: int = 1) -> np.ndarray:
    """
    蒙特卡洛: 一组步长下第 k 轮迭代点

    同一试验的调度在所有步长间共用，发散的试验记为 inf。

    Args:
        p (FiniteSumProblem): 问题
        scheme (SamplingScheme): 采样方案
        etas (Sequence[float]): 步长网格
        k (int): 轮数
        trials (int): 试验数
        seed (int): 基础种子，第 t 次试验的调度由 (seed, t) 决定
        x0 (Optional[float]): 初始点
        workers (int): 进程数

    Returns:
        np.ndarray: 形状 (len(etas), trials)
    """
    scheme = SamplingScheme(scheme)
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    for eta in etas:
        _check_eta(eta)
    if trials < 1:
        raise ValueError(f"试验数必须至少为 1，当前 trials={trials}")
    if k < 1:
        raise ValueError(f"轮数 k 必须至少为 1，当前 k={k}")
    x0 = p.recommended_x0 if x0 is None else float(x0)

    tasks = [(p.a, p.b, scheme, p.n, int(k), etas, x0, int(seed), start, min(start + TRIAL_CHUNK, trials))
             for start in range(0, trials, TRIAL_CHUNK)]
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=workers) as pool:
            parts = pool.map(_simulate_chunk, tasks)
    else:
        parts = [_simulate_chunk(task) for task in tasks]
    return np.concatenate(parts, axis=1)


def _sample_stats(values: np.ndarray) -> Tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / np.sqrt(values.size))


def estimate_suboptimality(p: FiniteSumProblem, scheme: SamplingScheme, eta: float, k: int,
                           trials: int, seed: int, x0: Optional[float] = None,
                           workers: int = 1) -> MomentEstimate:
    """
    估计 E[F(x_k) − F*]

    Args:
        p (FiniteSumProblem): 问题
        scheme (SamplingScheme): 采样方案
        eta (float): 步长
        k (int): 轮数
        trials (int): 试验数，增量方案是确定性的，只运行一次
        seed (int): 基础种子
        x0 (Optional[float]): 初始点
        workers (int): 进程数，不影响结果

    Returns:
        MomentEstimate: 矩估计，任一试验发散即标记为发散
    """
    scheme = SamplingScheme(scheme)
    if scheme is SamplingScheme.INCREMENTAL:
        trials = 1
    xs = final_iterates(p, scheme, [eta], k, trials, seed, x0=x0, workers=workers)[0]

    bad = ~np.isfinite(xs)
    if bad.any():
        logger.warning("%d of %d trials diverged (scheme=%s, eta=%g)", int(bad.sum()), trials, scheme.value, eta)
        return MomentEstimate(scheme=scheme, n=p.n, k=int(k), eta=float(eta),
                              mean_x=float('nan'), mean_x_sq=float('inf'), mean_subopt=float('inf'),
                              stderr_subopt=float('nan'), stderr_x=float('nan'), stderr_x_sq=float('nan'),
                              trials=int(trials), seed=int(seed), diverged=True,
                              diverged_trials=int(bad.sum()))

    dev = xs - p.x_star
    mean_x, se_x = _sample_stats(xs)
    mean_x_sq, se_x_sq = _sample_stats(xs * xs)
    mean_sub, se_sub = _sample_stats(0.5 * p.lambda_ * dev * dev)
    return MomentEstimate(scheme=scheme, n=p.n, k=int(k), eta=float(eta),
                          mean_x=mean_x, mean_x_sq=mean_x_sq, mean_subopt=mean_sub,
                          stderr_subopt=se_sub, stderr_x=se_x, stderr_x_sq=se_x_sq,
                          trials=int(trials), seed=int(seed))


def _epoch_maps(p: FiniteSumProblem, eta: float, orders: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """每个排列对应的轮映射 x ↦ A x + c"""
    m = 1.0 - eta * p.a
    d = -eta * p.b
    A = np.ones(orders.shape[0])
    c = np.zeros(orders.shape[0])
    with np.errstate(over='ignore', invalid='ignore'):
        for j in range(orders.shape[1]):
            i = orders[:, j]
            A = m[i] * A
            c = m[i] * c + d[i]
    return A, c


def exact_moments(p: FiniteSumProblem, scheme: SamplingScheme, eta: float, k: int,
                  x0: Optional[float] = None) -> ExactMoments:
    """
    对方案的全部调度精确求期望

    随机重排各轮独立，单轮对 n! 个排列求精确一、二阶矩后逐轮递推；
    单次打乱对 n! 个排列各自迭代 k 轮再平均；有放回采样逐步传播精确矩，
    等价于枚举全部 n^(nk) 个下标序列。

    Args:
        p (FiniteSumProblem): 问题（排列类方案要求 n ≤ 8）
        scheme (SamplingScheme): 采样方案
        eta (float): 步长
        k (int): 轮数
        x0 (Optional[float]): 初始点

    Returns:
        ExactMoments: E[x_k]、E[x_k²] 与期望次优间隙
    """
    scheme = SamplingScheme(scheme)
    _check_eta(eta)
    x0 = p.recommended_x0 if x0 is None else float(x0)
    n = p.n

    with np.errstate(over='ignore', invalid='ignore'):
        if scheme is SamplingScheme.INCREMENTAL:
            traj = run_schedule(p, Schedule(scheme, n, k, np.tile(np.arange(1, n + 1), k), None), eta, x0)
            m1 = float(traj.epoch_iterates[-1])
            m2 = m1 * m1
            count = 1
        elif scheme is SamplingScheme.WITH_REPLACEMENT:
            m = 1.0 - eta * p.a
            d = -eta * p.b
            Em, Em2, Ed, Emd, Ed2 = (float(np.mean(v)) for v in (m, m * m, d, m * d, d * d))
            m1, m2 = x0, x0 * x0
            for _ in range(n * k):
                m1, m2 = Em * m1 + Ed, Em2 * m2 + 2.0 * Emd * m1 + Ed2
            count = n ** (n * k)
        else:
            orders = all_permutations(n)
            A, c = _epoch_maps(p, eta, orders)
            count = orders.shape[0]
            if scheme is SamplingScheme.SINGLE_SHUFFLE:
                x = np.full(count, x0)
                for _ in range(k):
                    x = A * x + c
                m1 = float(np.mean(x))
                m2 = float(np.mean(x * x))
            else:
                EA, Ec, EA2, EAc, Ec2 = (float(np.mean(v)) for v in (A, c, A * A, A * c, c * c))
                m1, m2 = x0, x0 * x0
                for _ in range(k):
                    m1, m2 = EA * m1 + Ec, EA2 * m2 + 2.0 * EAc * m1 + Ec2
                count = count ** k
        x_star = p.x_star
        sub = 0.5 * p.lambda_ * (m2 - 2.0 * x_star * m1 + x_star * x_star)
    if not np.isfinite(m2) or abs(m2) > DIVERGENCE_THRESHOLD ** 2:
        m2, sub = float('inf'), float('inf')
    logger.debug("exact moments over %s schedules (scheme=%s, n=%d, k=%d)", count, scheme.value, n, k)
    return ExactMoments(scheme=scheme, n=n, k=int(k), eta=float(eta), mean_x=float(m1),
                        mean_x_sq=float(m2), mean_subopt=float(max(sub, 0.0)), schedules=int(count))


def trajectory_frame(p: FiniteSumProblem, traj: EpochTrajectory, trial: str = '0') -> pd.DataFrame:
    """
    轨迹导出为表格

    Args:
        p (FiniteSumProblem): 问题
        traj (EpochTrajectory): 轨迹
        trial (str): trial_or_exact 列的取值

    Returns:
        pd.DataFrame: 列为 TRAJECTORY_COLUMNS
    """
    rows = []
    for t, x in enumerate(traj.epoch_iterates, 1):
        rows.append({
            'scheme': traj.scheme.value, 'n': traj.n, 'k': traj.k, 'eta': traj.eta,
            'trial_or_exact': trial, 'epoch': t, 'x': float(x),
            'subopt': suboptimality(p, float(x)) if np.isfinite(x) else float('inf'),
        })
    return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS)


def estimate_frame(estimates: List) -> pd.DataFrame:
    """
    矩估计（或精确矩）导出为表格

    Args:
        estimates (List): MomentEstimate 或 ExactMoments 列表

    Returns:
        pd.DataFrame: 基本列之后附加二阶矩、标准误差与试验数
    """
    rows = []
    for est in estimates:
        exact = isinstance(est, ExactMoments)
        rows.append({
            'scheme': est.scheme.value, 'n': est.n, 'k': est.k, 'eta': est.eta,
            'trial_or_exact': 'exact' if exact else 'mean',
            'epoch': est.k, 'x': est.mean_x, 'subopt': est.mean_subopt,
            'x_sq': est.mean_x_sq,
            'stderr_subopt': 0.0 if exact else est.stderr_subopt,
            'trials': est.schedules if exact else est.trials,
            'seed': '' if exact else est.seed,
            'diverged': bool(est.diverged),
        })
    return pd.DataFrame(rows)
