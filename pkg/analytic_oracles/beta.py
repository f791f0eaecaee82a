"""
每轮噪声注入系数 β
β(n, α) = E[(Σ_{i<n} σ_i (1−α)^i)²]，σ 为平衡 ±1 模式
"""

import logging
from dataclasses import dataclass

import numpy as np

from quadratic_problem import check_even
from .patterns import MAX_PATTERN_N, balanced_sign_patterns
from .series import geometric_sum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BetaQuery:
    """β 的查询参数"""

    n: int
    alpha: float

    def __post_init__(self):
        check_even(self.n)
        if not self.alpha > 0:
            raise ValueError(f"α 必须为正，当前 α={self.alpha}")


def _power_offsets(n: int, alpha: float) -> np.ndarray:
    """(1−α)^i − 1，i = 0..n−1；Σσ = 0，整体平移不改变 Σσ_i w_i"""
    i = np.arange(n, dtype=float)
    if alpha < 1.0:
        return np.expm1(i * np.log1p(-alpha))
    return (1.0 - alpha) ** i - 1.0


def beta_closed_form(n: int, alpha: float) -> float:
    """
    β 的闭式

    β = (1 + 1/(n−1))·Σ(1−α)^{2i} − (1/(n−1))·(Σ(1−α)^i)²，
    等价于 (n/(n−1))·Σ(w_i − w̄)²，w_i = (1−α)^i。
    nα < 1 时两项几乎相消，改用中心化平方和；其余情形用几何级数比值形式。

    Args:
        n (int): 偶数
        alpha (float): α = ηλ > 0

    Returns:
        float: β ≥ 0
    """
    query = BetaQuery(n, alpha)
    n, alpha = query.n, float(query.alpha)
    if alpha == 1.0:
        return 1.0
    if n * alpha < 1.0:
        w = _power_offsets(n, alpha)
        centered = w - w.mean()
        return float(n / (n - 1) * np.sum(centered * centered))
    s1 = geometric_sum(alpha, 1, n)
    s2 = geometric_sum(alpha, 2, n)
    with np.errstate(over='ignore', invalid='ignore'):
        value = (1.0 + 1.0 / (n - 1)) * s2 - s1 * s1 / (n - 1)
    return float(max(value, 0.0))


def beta_enumerated(n: int, alpha: float) -> float:
    """
    对全部 C(n, n/2) 个平衡模式直接求期望

    Args:
        n (int): 偶数，n ≤ 16
        alpha (float): α > 0

    Returns:
        float: β 的枚举值
    """
    BetaQuery(n, alpha)
    if n > MAX_PATTERN_N:
        raise ValueError(f"β 的枚举要求 n ≤ {MAX_PATTERN_N}，当前 n={n}")
    patterns = balanced_sign_patterns(n)
    sums = patterns @ _power_offsets(n, float(alpha))
    return float(np.mean(sums * sums))


def beta_lower_envelope(n: int, alpha: float) -> float:
    """
    下包络 min{1 + 1/α, n³α²}（不含常数 c）

    Args:
        n (int): 偶数
        alpha (float): α > 0

    Returns:
        float: 包络值
    """
    return float(min(1.0 + 1.0 / alpha, n ** 3 * alpha ** 2))


def monotonicity_term(n: int, alpha: float) -> float:
    """1 − (2−α)/(nα) + (1 + (2−α)/(nα))(1−α)^n，在 [1/(13n), 1) 上单调不减"""
    r = (2.0 - alpha) / (n * alpha)
    return float(1.0 - r + (1.0 + r) * (1.0 - alpha) ** n)


def check_monotonicity(n: int, points: int = 1000) -> bool:
    """
    在 [1/(13n), 1) 上等距取点检查 monotonicity_term 不减

    Args:
        n (int): 偶数
        points (int): 采样点数

    Returns:
        bool: 是否处处不减（允许 1e−12 的舍入）
    """
    check_even(n)
    alphas = np.linspace(1.0 / (13 * n), 1.0, points, endpoint=False)
    values = np.array([monotonicity_term(n, a) for a in alphas])
    steps = np.diff(values)
    ok = bool(np.all(steps >= -1e-12 * np.maximum(1.0, np.abs(values[1:]))))
    if not ok:
        logger.warning("monotonicity check failed for n=%d: min step %g", n, steps.min())
    return ok
