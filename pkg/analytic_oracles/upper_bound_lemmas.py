"""
上界证明中的辅助量
乘积与求和之差、排列加权噪声和 X_σ 的矩、Hoeffding-Serfling 界
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from quadratic_problem import FiniteSumProblem
from sgd_engine import MAX_ENUMERATION_N, all_permutations, trial_generator
from .check_result import LemmaCheckResult

logger = logging.getLogger(__name__)


@dataclass
class ProductSumGap:
    """|Π(1−a_i) − (1−Σa_i)| 与界 2(Σa_i)²"""

    gap: float
    bound: float
    satisfied: bool


def product_sum_gap(a_vec: Sequence[float]) -> ProductSumGap:
    """
    比较 Π(1−a_i) 与 1 − Σa_i

    Args:
        a_vec (Sequence[float]): 每个元素在 [0, 1/(10n)] 内

    Returns:
        ProductSumGap: 差值、界与是否满足
    """
    a = np.asarray(a_vec, dtype=float)
    n = a.size
    if n == 0:
        raise ValueError("序列不能为空")
    upper = 1.0 / (10 * n)
    if np.any(a < 0) or np.any(a > upper):
        raise ValueError(f"每个 a_i 必须在 [0, 1/(10n)] = [0, {upper}] 内")
    total = float(a.sum())
    # Π(1−a_i) − 1 用 expm1(Σlog1p) 计算，避免与 1 − Σa 相减时丢精度
    gap = abs(float(np.expm1(np.sum(np.log1p(-a)))) + total)
    bound = 2.0 * total * total
    return ProductSumGap(gap=gap, bound=bound, satisfied=gap <= bound)


def _check_zero_sum(p: FiniteSumProblem) -> None:
    b = p.b
    if abs(b.sum()) > 1e-9 * max(1.0, float(np.abs(b).sum())):
        raise ValueError(f"X_σ 要求 Σb_i = 0（平移后的实例），当前 Σb_i={b.sum()!r}")


def x_sigma_batch(p: FiniteSumProblem, orders: np.ndarray, eta: float) -> np.ndarray:
    """
    一批排列的 X_σ，orders 形状 (P, n)，下标从 0 开始
    """
    m = 1.0 - eta * p.a
    b = p.b
    acc = np.zeros(orders.shape[0])
    for j in range(orders.shape[1]):
        i = orders[:, j]
        acc = acc * m[i] + b[i]
    return acc


def x_sigma(p: FiniteSumProblem, sigma: Sequence[int], eta: float) -> float:
    """
    X_σ = Σ_j (Π_{i>j}(1−ηa_{σ(i)}))·b_{σ(j)}

    一轮从 x* = 0 出发的 SGD 结束于 −η·X_σ。

    Args:
        p (FiniteSumProblem): Σb_i = 0 的实例
        sigma (Sequence[int]): 排列，下标从 0 开始
        eta (float): 步长

    Returns:
        float: X_σ
    """
    _check_zero_sum(p)
    order = np.asarray(sigma, dtype=np.int64)
    if sorted(order.tolist()) != list(range(p.n)):
        raise ValueError(f"sigma 必须是 0..{p.n - 1} 的排列")
    return float(x_sigma_batch(p, order[None, :], eta)[0])


def second_moment_bound(eta: float, n: int, L: float, G: float) -> float:
    """5η²n³L²G²log(2n)"""
    return 5.0 * eta ** 2 * n ** 3 * L ** 2 * G ** 2 * np.log(2 * n)


def first_moment_bound(eta: float, n: int, L: float, G: float) -> float:
    """2ηnGL"""
    return 2.0 * eta * n * G * L


def worst_case_x_sigma_bound(eta: float, n: int, L: float, G: float) -> float:
    """不依赖随机性的界 η²n⁴G²L²"""
    return eta ** 2 * n ** 4 * G ** 2 * L ** 2


@dataclass
class XSigmaCheck:
    """X_σ 一、二阶矩及两个界的检查"""

    mean: float
    second_moment: float
    mean_stderr: float
    second_stderr: float
    second: LemmaCheckResult
    first: LemmaCheckResult
    worst_case_bound: float
    mode: str
    samples: int

    @property
    def satisfied(self) -> bool:
        return self.second.satisfied and self.first.satisfied


def x_sigma_moments(p: FiniteSumProblem, eta: float, mode: str = 'enumerate',
                    trials: int = 100_000, seed: int = 0) -> XSigmaCheck:
    """
    X_σ 的矩与上界

    二阶矩界 5η²n³L²G²log(2n) 要求 ηL ≤ 1，一阶矩界 2ηnGL 要求 ηnL ≤ 0.5，
    前提不满足时对应结果 checked=False。蒙特卡洛模式下用 均值 + 4 倍标准误差 与界比较。

    Args:
        p (FiniteSumProblem): Σb_i = 0 的实例
        eta (float): 步长
        mode (str): 'enumerate'（n ≤ 8）或 'monte_carlo'
        trials (int): 蒙特卡洛样本数
        seed (int): 种子

    Returns:
        XSigmaCheck: 两项检查
    """
    _check_zero_sum(p)
    if not eta > 0:
        raise ValueError(f"步长 η 必须为正，当前 η={eta}")
    n, L, G = p.n, p.L, p.G

    if mode == 'enumerate':
        if n > MAX_ENUMERATION_N:
            raise ValueError(f"枚举模式要求 n ≤ {MAX_ENUMERATION_N}，当前 n={n}")
        orders = all_permutations(n)
    elif mode == 'monte_carlo':
        if trials < 2:
            raise ValueError(f"蒙特卡洛模式至少需要 2 个样本，当前 trials={trials}")
        rng = trial_generator(seed, 0)
        orders = rng.permuted(np.tile(np.arange(n), (trials, 1)), axis=1)
    else:
        raise ValueError(f"未知的模式 '{mode}'，可选 enumerate / monte_carlo")

    values = x_sigma_batch(p, orders, eta)
    squares = values * values
    mean = float(values.mean())
    second = float(squares.mean())
    if mode == 'enumerate':
        se_mean, se_second, margin = 0.0, 0.0, 0.0
    else:
        se_mean = float(values.std(ddof=1) / np.sqrt(values.size))
        se_second = float(squares.std(ddof=1) / np.sqrt(values.size))
        margin = 4.0

    params = {'n': n, 'eta': eta, 'L': L, 'G': G, 'mode': mode}

    bound2 = second_moment_bound(eta, n, L, G)
    applies2 = eta * L <= 1.0
    second_check = LemmaCheckResult(
        lemma_id='x_sigma_second_moment', params=params, exact_value=second,
        bound_value=bound2,
        satisfied=(second + margin * se_second <= bound2) if applies2 else True,
        empirical_constant=second / bound2 if bound2 > 0 else None,
        checked=applies2,
    )

    bound1 = first_moment_bound(eta, n, L, G)
    applies1 = eta * n * L <= 0.5
    first_check = LemmaCheckResult(
        lemma_id='x_sigma_first_moment', params=params, exact_value=abs(mean),
        bound_value=bound1 if applies1 else None,
        satisfied=(abs(mean) + margin * se_mean <= bound1) if applies1 else True,
        empirical_constant=abs(mean) / bound1 if bound1 > 0 else None,
        checked=applies1,
    )
    if not applies1:
        logger.debug("first-moment bound skipped: eta*n*L=%g > 0.5", eta * n * L)

    return XSigmaCheck(mean=mean, second_moment=second, mean_stderr=se_mean, second_stderr=se_second,
                       second=second_check, first=first_check,
                       worst_case_bound=worst_case_x_sigma_bound(eta, n, L, G),
                       mode=mode, samples=int(values.size))


def hoeffding_serfling_bound(n: int, j: int, delta: float, range_width: float) -> float:
    """
    无放回抽样前缀均值偏差的单侧界

    (b−a)·√(ρ_j·log(1/δ)/(2j))，ρ_j = min{1−(j−1)/n, (1−j/n)(1+1/j)}

    Args:
        n (int): 总体大小
        j (int): 前缀长度，1 ≤ j ≤ n
        delta (float): 失败概率，δ ∈ (0, 1]
        range_width (float): 取值区间宽度 b − a

    Returns:
        float: 界
    """
    if not 1 <= j <= n:
        raise ValueError(f"前缀长度需满足 1 ≤ j ≤ n，当前 j={j}, n={n}")
    if not 0 < delta <= 1:
        raise ValueError(f"δ 必须在 (0, 1] 内，当前 δ={delta}")
    rho = min(1.0 - (j - 1) / n, (1.0 - j / n) * (1.0 + 1.0 / j))
    return float(range_width * np.sqrt(max(rho, 0.0) * np.log(1.0 / delta) / (2.0 * j)))


def hoeffding_serfling_violation_rate(values: Sequence[float], j: int, delta: float,
                                      samples: int, seed: int,
                                      range_width: Optional[float] = None) -> float:
    """
    随机排列前缀均值超出界的经验频率

    Args:
        values (Sequence[float]): 总体取值
        j (int): 前缀长度
        delta (float): 失败概率
        samples (int): 抽样次数
        seed (int): 种子
        range_width (Optional[float]): 区间宽度，缺省为 max − min

    Returns:
        float: 违反比例，不等式成立时期望不超过 δ
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    width = float(x.max() - x.min()) if range_width is None else float(range_width)
    bound = hoeffding_serfling_bound(n, j, delta, width)
    rng = trial_generator(seed, 0)
    orders = rng.permuted(np.tile(np.arange(n), (samples, 1)), axis=1)[:, :j]
    deviation = x[orders].mean(axis=1) - x.mean()
    return float(np.mean(deviation > bound))
