"""
速率实验包
步长最坏情况误差、规模扫描、速率拟合与上下界验证
"""

from .sweeps import (
    DEFAULT_ETA_POINTS,
    SWEEP_COLUMNS,
    EstimatorKind,
    StepsizeMinimum,
    SweepAxis,
    SweepPoint,
    SweepResult,
    SweepSpec,
    default_eta_grid,
    epoch_errors,
    exact_available,
    min_over_stepsize,
    scaling_sweep,
)
from .fitting import FIT_COLUMNS, FitModel, RateFit, fit_frame, fit_points, fit_rate
from .bounds import (
    BOUND_COLUMNS,
    N_VARIATION_LIMIT,
    BoundPoint,
    BoundReport,
    HypothesisError,
    bound_verdict,
    frame_verdict,
    lower_bound_formula,
    merge_reports,
    n_variation,
    relative_spread,
    separation_ratios,
    upper_bound_step_size,
    upper_bound_value,
    verify_lower_bound,
    verify_upper_bound,
)
from .rate_table import (
    EXACT_TOLERANCE,
    MONTE_CARLO_TOLERANCE,
    Criterion,
    RateMeasurement,
    assemble_rate_table,
    default_measurements,
    measure,
)

__all__ = [
    'DEFAULT_ETA_POINTS',
    'SWEEP_COLUMNS',
    'FIT_COLUMNS',
    'BOUND_COLUMNS',
    'EXACT_TOLERANCE',
    'MONTE_CARLO_TOLERANCE',
    'N_VARIATION_LIMIT',
    'Criterion',
    'EstimatorKind',
    'SweepAxis',
    'SweepSpec',
    'SweepPoint',
    'SweepResult',
    'StepsizeMinimum',
    'FitModel',
    'RateFit',
    'BoundPoint',
    'BoundReport',
    'HypothesisError',
    'RateMeasurement',
    'default_eta_grid',
    'epoch_errors',
    'exact_available',
    'min_over_stepsize',
    'scaling_sweep',
    'fit_points',
    'fit_rate',
    'fit_frame',
    'bound_verdict',
    'frame_verdict',
    'n_variation',
    'lower_bound_formula',
    'merge_reports',
    'separation_ratios',
    'upper_bound_step_size',
    'upper_bound_value',
    'verify_lower_bound',
    'verify_upper_bound',
    'assemble_rate_table',
    'default_measurements',
    'measure',
    'relative_spread',
]
