"""
收缩因子 (1−α) 的幂与几何级数
α 很小时 1 − (1−α)^m 直接计算会丢失全部精度，统一改用 expm1/log1p
"""

import logging

import numpy as np

logger = logging.getLogger(__name__)

# 分母小于该值时改用逐项求和
VANISHING_DENOMINATOR = 1e-12


def log_abs_contraction(alpha: float) -> float:
    """log|1−α|，α = 1 时为 −inf"""
    if alpha < 1.0:
        return float(np.log1p(-alpha))
    if alpha == 1.0:
        return float('-inf')
    return float(np.log1p(alpha - 2.0))


def contraction_power(alpha: float, m: int) -> float:
    """
    (1−α)^m

    Args:
        alpha (float): 收缩参数 α = ηλ
        m (int): 非负整数幂

    Returns:
        float: 幂值，1−α < 0 时按 m 的奇偶取符号
    """
    if m == 0:
        return 1.0
    if alpha == 1.0:
        return 0.0
    with np.errstate(over='ignore'):
        magnitude = float(np.exp(m * log_abs_contraction(alpha)))
    if alpha > 1.0 and m % 2 == 1:
        return -magnitude
    return magnitude


def one_minus_power(alpha: float, m: int) -> float:
    """
    1 − (1−α)^m，对所有 α 保持相对精度

    Args:
        alpha (float): 收缩参数
        m (int): 非负整数幂

    Returns:
        float: 1 − (1−α)^m
    """
    if m == 0:
        return 0.0
    if alpha == 1.0:
        return 1.0
    lg = log_abs_contraction(alpha)
    with np.errstate(over='ignore'):
        if alpha < 1.0 or m % 2 == 0:
            return float(-np.expm1(m * lg))
        return float(1.0 + np.exp(m * lg))


def geometric_sum(alpha: float, m: int, count: int) -> float:
    """
    Σ_{j=0}^{count−1} (1−α)^{m·j}

    比值形式 (1 − (1−α)^{m·count}) / (1 − (1−α)^m)，分母在 1e−12 以内趋零时逐项求和。

    Args:
        alpha (float): 收缩参数
        m (int): 公比的幂次
        count (int): 项数

    Returns:
        float: 级数和
    """
    if count <= 0:
        return 0.0
    denominator = one_minus_power(alpha, m)
    if abs(denominator) < VANISHING_DENOMINATOR:
        logger.debug("explicit geometric sum (alpha=%r, m=%d, count=%d)", alpha, m, count)
        return float(sum(contraction_power(alpha, m * j) for j in range(count)))
    with np.errstate(over='ignore', invalid='ignore'):
        return one_minus_power(alpha, m * count) / denominator
