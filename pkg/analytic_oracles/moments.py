"""
下界构造的精确期望
SignedLinear 在随机重排/单次打乱/有放回采样下的 E[x_k²]，
CyclicSplit 在增量方法下的确定轨迹，HalfCurved 在随机重排下的一、二阶矩
"""

import logging
from typing import List, Tuple

import numpy as np

from quadratic_problem import check_even
from .beta import beta_closed_form
from .patterns import two_variant_epoch_moments
from .series import contraction_power, geometric_sum, one_minus_power

logger = logging.getLogger(__name__)


def _check_args(n: int, k: int, eta: float, lam: float) -> None:
    check_even(n)
    if k < 0:
        raise ValueError(f"轮数 k 不能为负，当前 k={k}")
    if not eta > 0:
        raise ValueError(f"步长 η 必须为正，当前 η={eta}")
    if not lam > 0:
        raise ValueError(f"强凸参数 λ 必须为正，当前 λ={lam}")


def reshuffle_second_moment(n: int, k: int, eta: float, lam: float, G: float, x0: float) -> float:
    """
    随机重排下 SignedLinear 的 E[x_k²]

    每轮 E[x_{t+1}²] = (1−ηλ)^{2n}E[x_t²] + (ηG/2)²β，从 x0² 递推 k 次。

    Args:
        n (int): 偶数
        k (int): 轮数
        eta (float): 步长
        lam (float): λ
        G (float): 梯度界
        x0 (float): 初始点

    Returns:
        float: E[x_k²]
    """
    _check_args(n, k, eta, lam)
    if k == 0:
        return float(x0 * x0)
    alpha = eta * lam
    with np.errstate(over='ignore', invalid='ignore'):
        bias = contraction_power(alpha, 2 * n * k) * x0 * x0
        if G == 0:
            return float(bias)
        noise = (eta * G / 2.0) ** 2 * beta_closed_form(n, alpha) * geometric_sum(alpha, 2 * n, k)
        return float(bias + noise)


def single_shuffle_second_moment(n: int, k: int, eta: float, lam: float, G: float, x0: float) -> float:
    """
    单次打乱下 SignedLinear 的 E[x_k²]

    E[x_k²] = (1−ηλ)^{2nk}x0² + (ηG/2)²·β·(Σ_{j<k}(1−ηλ)^{nj})²

    Args:
        n (int): 偶数
        k (int): 轮数
        eta (float): 步长
        lam (float): λ
        G (float): 梯度界
        x0 (float): 初始点

    Returns:
        float: E[x_k²]
    """
    _check_args(n, k, eta, lam)
    if k == 0:
        return float(x0 * x0)
    alpha = eta * lam
    with np.errstate(over='ignore', invalid='ignore'):
        bias = contraction_power(alpha, 2 * n * k) * x0 * x0
        if G == 0:
            return float(bias)
        ratio = geometric_sum(alpha, n, k)
        return float(bias + (eta * G / 2.0) ** 2 * beta_closed_form(n, alpha) * ratio * ratio)


def with_replacement_second_moment(n: int, k: int, eta: float, lam: float, G: float, x0: float) -> float:
    """
    有放回采样下 SignedLinear 的 E[x_T²]，T = nk

    每步独立取 b = ±G/2，E[x'²] = (1−ηλ)²E[x²] + (ηG/2)²。

    Args:
        n (int): 偶数
        k (int): 轮数
        eta (float): 步长
        lam (float): λ
        G (float): 梯度界
        x0 (float): 初始点

    Returns:
        float: E[x_T²]
    """
    _check_args(n, k, eta, lam)
    steps = n * k
    alpha = eta * lam
    with np.errstate(over='ignore', invalid='ignore'):
        bias = contraction_power(alpha, 2 * steps) * x0 * x0
        return float(bias + (eta * G / 2.0) ** 2 * geometric_sum(alpha, 2, steps))


def _incremental_epoch_map(n: int, eta: float, lam: float, G: float) -> Tuple[float, float]:
    """CyclicSplit 一轮的仿射映射 x ↦ P x + D，P = ρ^{n/2}，ρ = 1 − 2ηλ"""
    half = n // 2
    rho_alpha = 2.0 * eta * lam
    P = contraction_power(rho_alpha, half)
    # D = (ηG/2)·Σ_{i<n/2}(ρ^i − ρ^{n/2})，逐项 ρ^i(1 − ρ^{n/2−i}) 避免两个同量级项相减
    with np.errstate(over='ignore', invalid='ignore'):
        offset = sum(contraction_power(rho_alpha, i) * one_minus_power(rho_alpha, half - i)
                     for i in range(half))
        D = (eta * G / 2.0) * offset
    return P, D


def incremental_trajectory_exact(n: int, k: int, eta: float, lam: float, G: float,
                                 x0: float) -> List[float]:
    """
    增量方法在 CyclicSplit 上的轮末迭代点

    x_{t+1} = ρ^{n/2}(x_t − ηGn/4) + (ηG/2)Σ_{i<n/2} ρ^i，ρ = 1 − 2ηλ
    （第二半分量 λx² − (G/2)x 的真实单步收缩）。

    Args:
        n (int): 偶数
        k (int): 轮数
        eta (float): 步长
        lam (float): λ
        G (float): 梯度界
        x0 (float): 初始点

    Returns:
        List[float]: x_1..x_k
    """
    _check_args(n, k, eta, lam)
    P, D = _incremental_epoch_map(n, eta, lam, G)
    xs = []
    x = float(x0)
    with np.errstate(over='ignore', invalid='ignore'):
        for _ in range(k):
            x = P * x + D
            xs.append(float(x))
    return xs


def incremental_iterate_exact(n: int, k: int, eta: float, lam: float, G: float, x0: float) -> float:
    """
    增量方法在 CyclicSplit 上的第 k 轮迭代点，闭式 x_k = P^k·x0 + D·Σ_{j<k} P^j

    与 incremental_trajectory_exact 的末项相同，代价与 k 无关。

    Args:
        n (int): 偶数
        k (int): 轮数
        eta (float): 步长
        lam (float): λ
        G (float): 梯度界
        x0 (float): 初始点

    Returns:
        float: x_k
    """
    _check_args(n, k, eta, lam)
    if k == 0:
        return float(x0)
    P, D = _incremental_epoch_map(n, eta, lam, G)
    half = n // 2
    rho_alpha = 2.0 * eta * lam
    with np.errstate(over='ignore', invalid='ignore'):
        return float(contraction_power(rho_alpha, half * k) * x0
                     + D * geometric_sum(rho_alpha, half, k))


def incremental_fixed_point(n: int, eta: float, lam: float, G: float) -> float:
    """
    轮映射的不动点 [(ηG/2)Σρ^i − ρ^{n/2}ηGn/4] / (1 − ρ^{n/2})

    Args:
        n (int): 偶数
        eta (float): 步长
        lam (float): λ
        G (float): 梯度界

    Returns:
        float: 不动点，|ρ^{n/2}| = 1 时无定义
    """
    _check_args(n, 1, eta, lam)
    P, D = _incremental_epoch_map(n, eta, lam, G)
    if P == 1.0:
        raise ValueError(f"ρ^(n/2) = 1，轮映射没有不动点 (η={eta}, λ={lam})")
    return float(D / (1.0 - P))


def half_curved_reshuffle_moments(n: int, k: int, eta: float, lam: float, G: float,
                                  x0: float) -> Tuple[float, float]:
    """
    随机重排下 HalfCurved 的 (E[x_k], E[x_k²])

    一轮映射 x ↦ A x + c 的联合矩由平衡模式上的动态规划精确给出，
    各轮独立，按 E[x'] = E[A]E[x] + E[c]、
    E[x'²] = E[A²]E[x²] + 2E[Ac]E[x] + E[c²] 递推。
    递推是 (E[x²], E[x], 1) 上的线性映射，k 轮用矩阵幂计算。

    Args:
        n (int): 偶数
        k (int): 轮数
        eta (float): 步长
        lam (float): λ
        G (float): 梯度界
        x0 (float): 初始点（构造推荐 −1）

    Returns:
        Tuple[float, float]: (E[x_k], E[x_k²])
    """
    _check_args(n, k, eta, lam)
    # 弯曲分量 a=λ, b=G/2；平坦分量 a=0, b=−G/2
    curved = (1.0 - eta * lam, -eta * G / 2.0)
    flat = (1.0, eta * G / 2.0)
    mom = two_variant_epoch_moments(n, curved, flat)
    transition = np.array([
        [mom['A2'], 2.0 * mom['Ac'], mom['c2']],
        [0.0, mom['A'], mom['c']],
        [0.0, 0.0, 1.0],
    ])
    start = np.array([float(x0) * float(x0), float(x0), 1.0])
    with np.errstate(over='ignore', invalid='ignore'):
        m2, m1, _ = np.linalg.matrix_power(transition, k) @ start
    return float(m1), float(m2)
