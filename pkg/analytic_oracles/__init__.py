"""
解析预言包
β 系数、平衡模式的矩、下界构造的精确期望、上界证明的辅助量与引理检查套件
"""

from .series import contraction_power, geometric_sum, one_minus_power
from .patterns import (
    MAX_MOMENT_N,
    MAX_PATTERN_N,
    balanced_indicator_patterns,
    balanced_sign_patterns,
    sign_moment,
    sign_moment_enumerated,
    signed_prefix_expectation,
    signed_prefix_expectation_enumerated,
    stated_signed_prefix_expectation,
    two_variant_epoch_moments,
    zero_one_moment,
    zero_one_moment_enumerated,
)
from .beta import (
    BetaQuery,
    beta_closed_form,
    beta_enumerated,
    beta_lower_envelope,
    check_monotonicity,
    monotonicity_term,
)
from .moments import (
    half_curved_reshuffle_moments,
    incremental_fixed_point,
    incremental_iterate_exact,
    incremental_trajectory_exact,
    reshuffle_second_moment,
    single_shuffle_second_moment,
    with_replacement_second_moment,
)
from .check_result import LEMMA_COLUMNS, LemmaCheckResult, lemma_frame
from .upper_bound_lemmas import (
    ProductSumGap,
    XSigmaCheck,
    first_moment_bound,
    hoeffding_serfling_bound,
    hoeffding_serfling_violation_rate,
    product_sum_gap,
    second_moment_bound,
    worst_case_x_sigma_bound,
    x_sigma,
    x_sigma_moments,
)
from .lemma_suite import run_lemma_suite

__all__ = [
    'MAX_MOMENT_N',
    'MAX_PATTERN_N',
    'LEMMA_COLUMNS',
    'BetaQuery',
    'LemmaCheckResult',
    'ProductSumGap',
    'XSigmaCheck',
    'contraction_power',
    'geometric_sum',
    'one_minus_power',
    'balanced_indicator_patterns',
    'balanced_sign_patterns',
    'sign_moment',
    'sign_moment_enumerated',
    'zero_one_moment',
    'zero_one_moment_enumerated',
    'signed_prefix_expectation',
    'signed_prefix_expectation_enumerated',
    'stated_signed_prefix_expectation',
    'two_variant_epoch_moments',
    'beta_closed_form',
    'beta_enumerated',
    'beta_lower_envelope',
    'monotonicity_term',
    'check_monotonicity',
    'reshuffle_second_moment',
    'single_shuffle_second_moment',
    'with_replacement_second_moment',
    'incremental_trajectory_exact',
    'incremental_fixed_point',
    'incremental_iterate_exact',
    'half_curved_reshuffle_moments',
    'product_sum_gap',
    'x_sigma',
    'x_sigma_moments',
    'first_moment_bound',
    'second_moment_bound',
    'worst_case_x_sigma_bound',
    'hoeffding_serfling_bound',
    'hoeffding_serfling_violation_rate',
    'lemma_frame',
    'run_lemma_suite',
]
