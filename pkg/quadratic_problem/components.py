"""
一元二次有限和问题
f_i(x) = (a_i/2)x² + b_i x，F(x) = (1/n)Σ f_i(x)
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# 均值曲率的相对容差
CURVATURE_RTOL = 1e-12


@dataclass(frozen=True)
class QuadraticComponent:
    """单个分量 f(x) = (a/2)x² + bx"""

    a: float
    b: float

    def __post_init__(self):
        if not np.isfinite(self.a) or not np.isfinite(self.b):
            raise ValueError(f"分量系数必须是有限值: a={self.a}, b={self.b}")
        if self.a < 0:
            raise ValueError(f"曲率 a 必须非负（每个分量为凸函数），当前 a={self.a}")

    def gradient(self, x: float) -> float:
        return self.a * x + self.b

    def value(self, x: float) -> float:
        return 0.5 * self.a * x * x + self.b * x


@dataclass(frozen=True)
class FiniteSumProblem:
    """
    有限和问题，构造后不可变

    lambda_ 为 F 的强凸模（分量曲率的均值），L 为最大曲率，
    G 为 x* 处的梯度界，构造时检查 G ≥ max_i |a_i x* + b_i|。
    """

    components: Tuple[QuadraticComponent, ...]
    G: float
    recommended_x0: float = 1.0
    provenance: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.components) < 2:
            raise ValueError(f"分量个数 n 必须大于 1，当前 n={len(self.components)}")
        if self.lambda_ <= 0:
            raise ValueError(f"强凸模 λ = mean(a_i) 必须为正，当前 λ={self.lambda_}")
        grad_bound = self.grad_bound_at_xstar
        if not self.G + self.gradient_slack >= grad_bound:
            raise ValueError(f"梯度界 G={self.G} 小于 x* 处的最大分量梯度 {grad_bound:.17g}")

    @classmethod
    def from_coefficients(cls, a: Sequence[float], b: Sequence[float],
                          G: Optional[float] = None, recommended_x0: float = 1.0,
                          provenance: Optional[Dict[str, Any]] = None) -> 'FiniteSumProblem':
        """
        由系数数组构造问题

        Args:
            a (Sequence[float]): 曲率
            b (Sequence[float]): 一次项系数
            G (Optional[float]): 梯度界，缺省时取 x* 处的实际最大梯度
            recommended_x0 (float): 推荐初始点
            provenance (Optional[Dict[str, Any]]): 来源信息

        Returns:
            FiniteSumProblem: 问题实例
        """
        a_arr = np.asarray(a, dtype=float)
        b_arr = np.asarray(b, dtype=float)
        if a_arr.shape != b_arr.shape or a_arr.ndim != 1:
            raise ValueError(f"a 与 b 的长度不一致: {a_arr.shape} vs {b_arr.shape}")
        components = tuple(QuadraticComponent(float(ai), float(bi)) for ai, bi in zip(a_arr, b_arr))
        if G is None:
            x_star = -b_arr.sum() / a_arr.sum()
            G = float(np.max(np.abs(a_arr * x_star + b_arr)))
        return cls(components=components, G=float(G), recommended_x0=float(recommended_x0),
                   provenance=dict(provenance or {}))

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def a(self) -> np.ndarray:
        return np.array([c.a for c in self.components], dtype=float)

    @property
    def b(self) -> np.ndarray:
        return np.array([c.b for c in self.components], dtype=float)

    @property
    def lambda_(self) -> float:
        return float(np.mean([c.a for c in self.components]))

    @property
    def L(self) -> float:
        return float(max(c.a for c in self.components))

    @property
    def x_star(self) -> float:
        a = self.a
        b = self.b
        return float(-b.sum() / a.sum())

    @property
    def grad_bound_at_xstar(self) -> float:
        """max_i |a_i x* + b_i|"""
        return float(np.max(np.abs(self.a * self.x_star + self.b)))

    @property
    def gradient_slack(self) -> float:
        # x* 的舍入误差
        return CURVATURE_RTOL * (1.0 + float(np.max(np.abs(self.b))) + self.L * abs(self.x_star))

    def objective(self, x: float) -> float:
        """F(x) = (1/n)Σ f_i(x)"""
        return float(0.5 * self.lambda_ * x * x + np.mean(self.b) * x)


@dataclass
class ValidationReport:
    """假设检查结果，violations 为空表示全部通过"""

    mean_curvature: float
    max_curvature: float
    min_curvature: float
    grad_bound_at_xstar: float
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def component_gradient(c: QuadraticComponent, x: float) -> float:
    """
    分量在 x 处的导数

    Args:
        c (QuadraticComponent): 分量
        x (float): 点

    Returns:
        float: a·x + b
    """
    return c.gradient(x)


def objective(p: FiniteSumProblem, x: float) -> float:
    return p.objective(x)


def suboptimality(p: FiniteSumProblem, x: float) -> float:
    """
    次优间隙 F(x) − F(x*)

    二次函数下等于 (mean a / 2)(x − x*)²，直接用这一形式计算以避免相减抵消。

    Args:
        p (FiniteSumProblem): 问题
        x (float): 点

    Returns:
        float: 非负的次优间隙
    """
    d = x - p.x_star
    return 0.5 * p.lambda_ * d * d


def validate(p: FiniteSumProblem, lambda_claim: float, L_claim: float,
             G_claim: float) -> ValidationReport:
    """
    检查问题是否满足给定的 (λ, L, G) 假设

    Args:
        p (FiniteSumProblem): 问题
        lambda_claim (float): 声称的强凸模
        L_claim (float): 声称的光滑常数
        G_claim (float): 声称的 x* 处梯度界

    Returns:
        ValidationReport: 违反项按名称列出，违反不是异常
    """
    a = p.a
    b = p.b
    grad_bound = p.grad_bound_at_xstar
    report = ValidationReport(
        mean_curvature=float(a.mean()),
        max_curvature=float(a.max()),
        min_curvature=float(a.min()),
        grad_bound_at_xstar=grad_bound,
    )

    # 1. 均值曲率
    scale = max(abs(lambda_claim), abs(report.mean_curvature), np.finfo(float).tiny)
    if abs(report.mean_curvature - lambda_claim) > CURVATURE_RTOL * scale:
        report.violations.append(
            f"mean curvature {report.mean_curvature!r} != λ {lambda_claim!r}")

    # 2. 最大曲率
    if report.max_curvature > L_claim * (1 + CURVATURE_RTOL):
        report.violations.append(
            f"max curvature {report.max_curvature!r} > L {L_claim!r}")

    # 3. 凸性
    if report.min_curvature < 0:
        report.violations.append(f"negative curvature {report.min_curvature!r}")

    # 4. x* 处梯度界
    if grad_bound > G_claim + p.gradient_slack:
        report.violations.append(
            f"gradient bound at x* {grad_bound!r} > G {G_claim!r}")

    if report.violations:
        logger.debug("validation found %d violation(s): %s", len(report.violations), report.violations)
    return report
