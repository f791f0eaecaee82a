"""
平衡符号模式的矩
σ 为 (1,…,1,−1,…,−1) 或 (1,…,1,0,…,0) 的均匀随机排列
"""

import logging
from functools import lru_cache
from itertools import combinations
from typing import Dict, Tuple

import numpy as np

from quadratic_problem import check_even

logger = logging.getLogger(__name__)

# 模式枚举上限，C(16, 8) = 12870
MAX_PATTERN_N = 16
# 两两矩的枚举上限
MAX_MOMENT_N = 12


def _check_pattern_n(n: int, limit: int) -> None:
    check_even(n)
    if n > limit:
        raise ValueError(f"模式枚举要求 n ≤ {limit}，当前 n={n}")


@lru_cache(maxsize=None)
def balanced_indicator_patterns(n: int, limit: int = MAX_PATTERN_N) -> np.ndarray:
    """
    全部平衡 0/1 模式，形状 (C(n, n/2), n)

    Args:
        n (int): 偶数长度
        limit (int): n 的上限

    Returns:
        np.ndarray: 每行恰有 n/2 个 1
    """
    _check_pattern_n(n, limit)
    rows = []
    for ones in combinations(range(n), n // 2):
        row = np.zeros(n)
        row[list(ones)] = 1.0
        rows.append(row)
    patterns = np.array(rows)
    patterns.setflags(write=False)
    logger.debug("enumerated %d balanced patterns for n=%d", patterns.shape[0], n)
    return patterns


def balanced_sign_patterns(n: int, limit: int = MAX_PATTERN_N) -> np.ndarray:
    """全部平衡 ±1 模式"""
    return 2.0 * balanced_indicator_patterns(n, limit) - 1.0


def sign_moment(n: int, i: int, j: int) -> float:
    """
    E[σ_i σ_j]，σ 为平衡 ±1 模式

    Args:
        n (int): 偶数长度
        i (int): 位置（从 0 开始）
        j (int): 位置

    Returns:
        float: i = j 时为 1，否则 −1/(n−1)
    """
    check_even(n)
    if i == j:
        return 1.0
    return -1.0 / (n - 1)


def sign_moment_enumerated(n: int, i: int, j: int) -> float:
    patterns = balanced_sign_patterns(n, MAX_MOMENT_N)
    return float(np.mean(patterns[:, i] * patterns[:, j]))


def zero_one_moment(n: int, i: int, j: int) -> float:
    """
    E[σ_i σ_j]，σ 为平衡 0/1 模式

    Args:
        n (int): 偶数长度
        i (int): 位置
        j (int): 位置

    Returns:
        float: i = j 时为 1/2，否则 (1/4)(1 − 1/(n−1))
    """
    check_even(n)
    if i == j:
        return 0.5
    return 0.25 * (1.0 - 1.0 / (n - 1))


def zero_one_moment_enumerated(n: int, i: int, j: int) -> float:
    patterns = balanced_indicator_patterns(n, MAX_MOMENT_N)
    return float(np.mean(patterns[:, i] * patterns[:, j]))


def signed_prefix_expectation(n: int, eta_lambda: float) -> float:
    """
    E[Σ_{i<n} (1−2σ_i)(1 − ηλ Σ_{i<j<n} σ_j)]，σ 为平衡 0/1 模式

    Σ(1−2σ_i) = 0，剩下 −ηλ·E[Σ_{i<j}(1−2σ_i)σ_j]，共 n(n−1)/2 对，
    结果为 −ηλ·n/4，与枚举一致。

    Args:
        n (int): 偶数长度
        eta_lambda (float): ηλ

    Returns:
        float: 期望值
    """
    check_even(n)
    return -eta_lambda * n / 4.0


def stated_signed_prefix_expectation(n: int, eta_lambda: float) -> float:
    """
    同一期望的另一种写法 −ηλ·n(n+1)/(4(n−1))

    内层求和写到 σ_n，比模式多数了 n 对；仅用于在引理报告中并列对照。
    """
    check_even(n)
    return -eta_lambda * n * (n + 1) / (4.0 * (n - 1))


def signed_prefix_expectation_enumerated(n: int, eta_lambda: float) -> float:
    patterns = balanced_indicator_patterns(n, MAX_PATTERN_N)
    # 严格后缀和 Σ_{j>i} σ_j
    suffix = np.cumsum(patterns[:, ::-1], axis=1)[:, ::-1] - patterns
    values = np.sum((1.0 - 2.0 * patterns) * (1.0 - eta_lambda * suffix), axis=1)
    return float(np.mean(values))


def two_variant_epoch_moments(n: int, first: Tuple[float, float],
                              second: Tuple[float, float]) -> Dict[str, float]:
    """
    两类步骤各 n/2 个、均匀随机排列时，一轮仿射映射 x ↦ A x + c 的精确矩

    按已用第一类步骤的个数做前向动态规划，状态保存以概率加权的
    (质量, A, c, A², Ac, c²)，复杂度 O(n²)，不受 n 的枚举上限约束。

    Args:
        n (int): 偶数步数
        first (Tuple[float, float]): 第一类单步映射 (m, d)，x ↦ m x + d
        second (Tuple[float, float]): 第二类单步映射

    Returns:
        Dict[str, float]: 键为 'A', 'c', 'A2', 'Ac', 'c2'
    """
    check_even(n)
    half = n // 2

    def step(state: np.ndarray, m: float, d: float) -> np.ndarray:
        mass, A, c, A2, Ac, c2 = state.T
        return np.stack([
            mass,
            m * A,
            m * c + d * mass,
            m * m * A2,
            m * m * Ac + m * d * A,
            m * m * c2 + 2.0 * m * d * c + d * d * mass,
        ], axis=1)

    # state[r]: 已用 r 个第一类步骤
    state = np.zeros((half + 1, 6))
    state[0] = [1.0, 1.0, 0.0, 1.0, 0.0, 0.0]
    r = np.arange(half + 1, dtype=float)
    for j in range(n):
        remaining = n - j
        p_first = np.clip((half - r) / remaining, 0.0, 1.0)
        p_second = np.clip((half - (j - r)) / remaining, 0.0, 1.0)
        with np.errstate(over='ignore', invalid='ignore'):
            moved = step(state, *first) * p_first[:, None]
            stayed = step(state, *second) * p_second[:, None]
        new_state = stayed.copy()
        new_state[1:] += moved[:-1]
        state = new_state
    _, A, c, A2, Ac, c2 = state[half]
    return {'A': float(A), 'c': float(c), 'A2': float(A2), 'Ac': float(Ac), 'c2': float(c2)}
