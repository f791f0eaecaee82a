"""
SGD 模拟引擎包
采样方案、调度生成、轨迹模拟与蒙特卡洛矩估计
"""

from .schedules import (
    MAX_ENUMERATION_N,
    SamplingScheme,
    Schedule,
    all_permutations,
    sample_schedule,
    schedule_indices,
    trial_generator,
)
from .simulator import (
    DIVERGENCE_THRESHOLD,
    TRAJECTORY_COLUMNS,
    EpochTrajectory,
    ExactMoments,
    MomentEstimate,
    estimate_frame,
    estimate_suboptimality,
    exact_moments,
    final_iterates,
    run_schedule,
    trajectory_frame,
)

__all__ = [
    'MAX_ENUMERATION_N',
    'DIVERGENCE_THRESHOLD',
    'TRAJECTORY_COLUMNS',
    'SamplingScheme',
    'Schedule',
    'EpochTrajectory',
    'ExactMoments',
    'MomentEstimate',
    'all_permutations',
    'sample_schedule',
    'schedule_indices',
    'trial_generator',
    'run_schedule',
    'estimate_suboptimality',
    'final_iterates',
    'exact_moments',
    'trajectory_frame',
    'estimate_frame',
]
