"""
对数-对数收敛速率拟合
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import nnls
from scipy.stats import linregress

from .sweeps import SweepResult

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 3

FIT_COLUMNS = ['model', 'axis', 'exponent', 'intercept', 'r_squared', 'points', 'log_power',
               'coef_nk2', 'coef_nk3']


class FitModel(str, Enum):
    """
    pure-power: log 误差对 log 轴的直线
    two-term: A/(nk)² + B/(nk³)，A、B ≥ 0
    polylog: 先除以 log(nk)^p 再做 pure-power
    """

    PURE_POWER = "pure-power"
    TWO_TERM = "two-term"
    POLYLOG = "polylog"


@dataclass
class RateFit:
    """拟合结果，two-term 的 exponent 为拟合曲线在扫描范围内的平均斜率"""

    model: FitModel
    exponent: float
    intercept: float
    r_squared: float
    points: int
    axis: str = ''
    log_power: float = 0.0
    coefficients: Optional[Tuple[float, float]] = None

    def row(self) -> dict:
        coef = self.coefficients or (float('nan'), float('nan'))
        return {
            'model': self.model.value, 'axis': self.axis, 'exponent': self.exponent,
            'intercept': self.intercept, 'r_squared': self.r_squared, 'points': self.points,
            'log_power': self.log_power, 'coef_nk2': coef[0], 'coef_nk3': coef[1],
        }


def fit_frame(fits: Sequence[RateFit]) -> pd.DataFrame:
    return pd.DataFrame([f.row() for f in fits], columns=FIT_COLUMNS)


def _log_r_squared(log_y: np.ndarray, log_fit: np.ndarray) -> float:
    total = float(np.sum((log_y - log_y.mean()) ** 2))
    if total == 0:
        return 1.0
    value = 1.0 - float(np.sum((log_y - log_fit) ** 2)) / total
    return float(np.clip(value, 0.0, 1.0))


def _check_points(x: np.ndarray, y: np.ndarray) -> None:
    if x.size < MIN_FIT_POINTS:
        raise ValueError(f"拟合至少需要 {MIN_FIT_POINTS} 个点，当前 {x.size} 个")
    if x.shape != y.shape:
        raise ValueError(f"横纵坐标长度不一致: {x.shape} vs {y.shape}")
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise ValueError(f"误差必须是有限正数，当前: {y.tolist()}")
    if np.any(x <= 0):
        raise ValueError(f"轴取值必须为正，当前: {x.tolist()}")


def fit_points(x: Sequence[float], y: Sequence[float], model: FitModel = FitModel.PURE_POWER,
               n: Optional[Sequence[float]] = None, k: Optional[Sequence[float]] = None,
               log_power: float = 0.0, axis: str = '') -> RateFit:
    """
    对 (x, y) 点拟合速率

    Args:
        x (Sequence[float]): 轴取值
        y (Sequence[float]): 误差
        model (FitModel): 模型
        n (Optional[Sequence[float]]): 每点的 n，two-term 与 polylog 需要
        k (Optional[Sequence[float]]): 每点的 k
        log_power (float): polylog 的对数幂 p
        axis (str): 轴名称，仅用于记录

    Returns:
        RateFit: 拟合结果
    """
    model = FitModel(model)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_points(x, y)
    nk = x if n is None or k is None else np.asarray(n, dtype=float) * np.asarray(k, dtype=float)
    log_x = np.log(x)

    if model is FitModel.TWO_TERM:
        if n is None or k is None:
            raise ValueError("two-term 模型需要每个点的 n 与 k")
        n_arr = np.asarray(n, dtype=float)
        k_arr = np.asarray(k, dtype=float)
        basis = np.column_stack([1.0 / (n_arr * k_arr) ** 2, 1.0 / (n_arr * k_arr ** 3)])
        # 相对残差: 每行除以 y
        coef, _ = nnls(basis / y[:, None], np.ones_like(y))
        fitted = basis @ coef
        if not np.all(fitted > 0):
            raise ValueError("two-term 拟合的两个系数都为零，数据与模型不符")
        slope = linregress(log_x, np.log(fitted))
        return RateFit(model=model, exponent=float(slope.slope), intercept=float(slope.intercept),
                       r_squared=_log_r_squared(np.log(y), np.log(fitted)), points=int(x.size),
                       axis=axis, coefficients=(float(coef[0]), float(coef[1])))

    power = float(log_power) if model is FitModel.POLYLOG else 0.0
    if power and np.any(nk <= 1):
        raise ValueError("polylog 模型要求 n·k > 1")
    log_y = np.log(y) - power * np.log(np.log(nk)) if power else np.log(y)
    if np.ptp(log_x) == 0:
        raise ValueError("轴取值全部相同，无法拟合斜率")
    reg = linregress(log_x, log_y)
    fitted = reg.intercept + reg.slope * log_x
    return RateFit(model=model, exponent=float(reg.slope), intercept=float(reg.intercept),
                   r_squared=_log_r_squared(log_y, fitted), points=int(x.size), axis=axis,
                   log_power=power)


def fit_rate(sweep, model: FitModel = FitModel.PURE_POWER, log_power: float = 0.0) -> RateFit:
    """
    拟合扫描结果的速率指数

    Args:
        sweep (SweepResult | pd.DataFrame): 扫描结果或其 CSV 表格
        model (FitModel): pure-power、two-term 或 polylog
        log_power (float): polylog 的对数幂

    Returns:
        RateFit: 拟合结果
    """
    frame = sweep.frame() if isinstance(sweep, SweepResult) else sweep
    axis = str(frame['axis'].iloc[0]) if len(frame) and 'axis' in frame else ''
    fit = fit_points(frame['axis_value'].to_numpy(dtype=float), frame['error_star'].to_numpy(dtype=float),
                     model=model, n=frame['n'].to_numpy(dtype=float), k=frame['k'].to_numpy(dtype=float),
                     log_power=log_power, axis=axis)
    logger.info("fit %s on axis %s: exponent %.4f (r^2=%.4f, %d points)",
                fit.model.value, axis, fit.exponent, fit.r_squared, fit.points)
    return fit
