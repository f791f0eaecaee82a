"""
下界构造与随机实例
"""

import logging
from enum import Enum
from typing import List, Tuple

import numpy as np

from .components import FiniteSumProblem

logger = logging.getLogger(__name__)


class ConstructionKind(str, Enum):
    """三种困难构造"""

    SIGNED_LINEAR = "signed_linear"
    HALF_CURVED = "half_curved"
    CYCLIC_SPLIT = "cyclic_split"


class OrderPattern(str, Enum):
    """两种分量变体在下标中的排布"""

    BLOCK_HALVES = "block_halves"
    ALTERNATING = "alternating"


# 构造对应的初始点
CONSTRUCTION_START = {
    ConstructionKind.SIGNED_LINEAR: 1.0,
    ConstructionKind.HALF_CURVED: -1.0,
    ConstructionKind.CYCLIC_SPLIT: 1.0,
}


def recommended_start(kind: ConstructionKind) -> float:
    return CONSTRUCTION_START[ConstructionKind(kind)]


# 每种构造的 (第一变体, 第二变体) 系数，以 (λ, G) 的函数给出
def _variant_coefficients(kind: ConstructionKind, G: float,
                          lam: float) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    if kind is ConstructionKind.SIGNED_LINEAR:
        return (lam, G / 2), (lam, -G / 2)
    if kind is ConstructionKind.HALF_CURVED:
        return (lam, G / 2), (0.0, -G / 2)
    if kind is ConstructionKind.CYCLIC_SPLIT:
        # 第二变体写作 λx² − (G/2)x，即 a = 2λ
        return (0.0, G / 2), (2.0 * lam, -G / 2)
    raise ValueError(f"未知的构造类型: {kind}")


def variant_mask(n: int, order: OrderPattern) -> np.ndarray:
    """
    第一变体所在位置的布尔掩码

    Args:
        n (int): 分量个数（偶数）
        order (OrderPattern): 排布方式

    Returns:
        np.ndarray: 长度 n，True 表示第一变体
    """
    order = OrderPattern(order)
    if order is OrderPattern.BLOCK_HALVES:
        return np.arange(n) < n // 2
    # 奇数下标（从 1 开始计）放第一变体
    return np.arange(n) % 2 == 0


def check_even(n: int, what: str = "n") -> None:
    if int(n) != n or n < 2:
        raise ValueError(f"{what} 必须是大于 1 的整数，当前 {what}={n}")
    if n % 2 != 0:
        raise ValueError(
            f"{what}={n} 为奇数: 构造要求偶数个分量。奇数情形可通过补一个零函数 f_n = 0 "
            f"归约到 n−1 个分量，但这里不自动补齐，以保持期望精确")


def make_construction(kind: ConstructionKind, n: int, G: float, lam: float,
                      order: OrderPattern = OrderPattern.BLOCK_HALVES) -> FiniteSumProblem:
    """
    构造下界实例

    Args:
        kind (ConstructionKind): 构造类型
        n (int): 分量个数，必须为偶数
        G (float): 梯度界
        lam (float): 强凸参数 λ
        order (OrderPattern): 两种变体的排布

    Returns:
        FiniteSumProblem: SignedLinear/CyclicSplit 的 F = (λ/2)x²，HalfCurved 的 F = (λ/4)x²
    """
    kind = ConstructionKind(kind)
    check_even(n)
    if not G > 0:
        raise ValueError(f"梯度界 G 必须为正，当前 G={G}")
    if not lam > 0:
        raise ValueError(f"强凸参数 λ 必须为正，当前 λ={lam}")
    if G < 6 * lam:
        logger.warning("G=%s < 6λ=%s: the lower-bound theorems assume G >= 6λ", G, 6 * lam)

    first, second = _variant_coefficients(kind, G, lam)
    x0 = recommended_start(kind)
    mask = variant_mask(n, order)
    a = np.where(mask, first[0], second[0])
    b = np.where(mask, first[1], second[1])
    return FiniteSumProblem.from_coefficients(
        a, b, G=G, recommended_x0=x0,
        provenance={'kind': kind.value, 'order': OrderPattern(order).value,
                    'n': int(n), 'G': float(G), 'lambda': float(lam)},
    )


def make_random_instance(n: int, lam: float, L: float, G: float, seed: int) -> FiniteSumProblem:
    """
    生成满足假设的随机实例，x* = 0

    Args:
        n (int): 分量个数
        lam (float): 目标均值曲率 λ
        L (float): 曲率上界
        G (float): |b_i| 的上界
        seed (int): 随机种子

    Returns:
        FiniteSumProblem: mean(a) = λ，a_i ∈ [0, L]，Σb_i = 0，|b_i| ≤ G
    """
    if int(n) != n or n < 2:
        raise ValueError(f"分量个数 n 必须大于 1，当前 n={n}")
    if not 0 < lam <= L:
        raise ValueError(f"需要 0 < λ ≤ L，当前 λ={lam}, L={L}: 无法把均值曲率缩放到 λ")
    if not G > 0:
        raise ValueError(f"梯度界 G 必须为正，当前 G={G}")

    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))

    # 1. 曲率: 均匀采样后仿射缩放，保持在 [0, L] 内
    a = rng.uniform(0.0, L, size=n)
    m = a.mean()
    if m >= lam:
        a = a * (lam / m)
    else:
        a = L - (L - a) * ((L - lam) / (L - m))
    a = np.clip(a, 0.0, L)

    # 2. 一次项: 减去均值使 Σb = 0，越界时整体收缩
    b = rng.uniform(-G, G, size=n)
    b = b - b.mean()
    peak = np.max(np.abs(b))
    if peak > G:
        b = b * (G / peak)

    return FiniteSumProblem.from_coefficients(
        a, b, G=G, recommended_x0=1.0,
        provenance={'seed': int(seed), 'n': int(n), 'lambda': float(lam),
                    'L': float(L), 'G': float(G)},
    )


def variant_summary(p: FiniteSumProblem) -> List[Tuple[float, float, int]]:
    """按 (a, b) 分组统计分量个数，用于打印构造"""
    counts = {}
    for c in p.components:
        counts[(c.a, c.b)] = counts.get((c.a, c.b), 0) + 1
    return [(a, b, cnt) for (a, b), cnt in sorted(counts.items())]
