"""
引理检查套件
把每个闭式与对应的枚举或引擎结果逐一比对，结果汇总为 LemmaCheckResult 列表
"""

import logging
from typing import List

import numpy as np

from quadratic_problem import ConstructionKind, make_construction, make_random_instance
from sgd_engine import SamplingScheme, exact_moments, run_schedule, sample_schedule
from .beta import beta_closed_form, beta_enumerated, beta_lower_envelope, check_monotonicity
from .check_result import LemmaCheckResult, agreement
from .moments import (
    half_curved_reshuffle_moments,
    incremental_trajectory_exact,
    reshuffle_second_moment,
    single_shuffle_second_moment,
    with_replacement_second_moment,
)
from .patterns import (
    MAX_MOMENT_N,
    MAX_PATTERN_N,
    balanced_indicator_patterns,
    balanced_sign_patterns,
    sign_moment,
    signed_prefix_expectation,
    signed_prefix_expectation_enumerated,
    stated_signed_prefix_expectation,
    zero_one_moment,
)
from .upper_bound_lemmas import hoeffding_serfling_violation_rate, product_sum_gap, x_sigma_moments

logger = logging.getLogger(__name__)

BETA_RTOL = 1e-11
PINNED_TOL = 1e-13
MOMENT_TOL = 1e-12
ENGINE_RTOL = 1e-11

# X_σ 矩界: 随机实例总数，其中每 5 个有一个 n = 32 的蒙特卡洛实例
X_SIGMA_INSTANCES = 100
X_SIGMA_MC_EVERY = 5
X_SIGMA_MC_N = 32
X_SIGMA_MC_TRIALS = 100_000
HOEFFDING_SAMPLES = 100_000


def _even_range(upper: int) -> List[int]:
    return list(range(2, upper + 1, 2))


def check_beta(max_n: int, alpha_points: int = 50) -> List[LemmaCheckResult]:
    """β 闭式与枚举、固定值、下包络"""
    results = []
    alphas = np.logspace(-6, 1, alpha_points)
    for n in _even_range(min(max_n, MAX_PATTERN_N)):
        ratios = []
        for alpha in alphas:
            closed = beta_closed_form(n, alpha)
            results.append(agreement('beta_oracle', {'n': n, 'alpha': float(alpha)},
                                     closed, beta_enumerated(n, alpha), BETA_RTOL))
            ratios.append(closed / beta_lower_envelope(n, alpha))
        constant = float(min(ratios))
        results.append(LemmaCheckResult(
            lemma_id='beta_envelope', params={'n': n, 'alpha_points': alpha_points},
            exact_value=constant, bound_value=0.0, satisfied=constant > 0,
            empirical_constant=constant))
        results.append(agreement('beta_alpha_one', {'n': n}, beta_closed_form(n, 1.0), 1.0,
                                 0.0, PINNED_TOL))
    for alpha in (0.1, 0.5, 1.9):
        results.append(agreement('beta_n_two', {'alpha': alpha}, beta_closed_form(2, alpha),
                                 alpha * alpha, 0.0, PINNED_TOL))
    return results


def check_pattern_moments(max_n: int) -> List[LemmaCheckResult]:
    """两两矩与带符号前缀期望"""
    results = []
    for n in _even_range(min(max_n, MAX_MOMENT_N)):
        signs = balanced_sign_patterns(n, MAX_MOMENT_N)
        ones = balanced_indicator_patterns(n, MAX_MOMENT_N)
        sign_formula = np.array([[sign_moment(n, i, j) for j in range(n)] for i in range(n)])
        zero_one_formula = np.array([[zero_one_moment(n, i, j) for j in range(n)] for i in range(n)])
        sign_gap = float(np.max(np.abs(signs.T @ signs / signs.shape[0] - sign_formula)))
        zero_one_gap = float(np.max(np.abs(ones.T @ ones / ones.shape[0] - zero_one_formula)))
        results.append(LemmaCheckResult('sign_moment', {'n': n}, exact_value=sign_gap,
                                        oracle_value=0.0, satisfied=sign_gap <= MOMENT_TOL))
        results.append(LemmaCheckResult('zero_one_moment', {'n': n}, exact_value=zero_one_gap,
                                        oracle_value=0.0, satisfied=zero_one_gap <= MOMENT_TOL))
    for n in _even_range(min(max_n, MAX_PATTERN_N)):
        for eta_lambda in (0.0, 0.01, 0.2, 0.9):
            params = {'n': n, 'eta_lambda': eta_lambda,
                      'stated': stated_signed_prefix_expectation(n, eta_lambda)}
            results.append(agreement('signed_prefix', params,
                                     signed_prefix_expectation(n, eta_lambda),
                                     signed_prefix_expectation_enumerated(n, eta_lambda),
                                     0.0, MOMENT_TOL))
    return results


def check_monotone_term(max_n: int) -> List[LemmaCheckResult]:
    return [LemmaCheckResult('monotonicity', {'n': n, 'points': 1000}, exact_value=1.0,
                             satisfied=check_monotonicity(n, 1000))
            for n in _even_range(max_n)]


def check_closed_forms_against_engine(max_n: int) -> List[LemmaCheckResult]:
    """闭式与引擎的全调度精确期望"""
    results = []
    G, lam = 6.0, 1.0
    for n in _even_range(min(max_n, 8)):
        p = make_construction(ConstructionKind.SIGNED_LINEAR, n, G, lam)
        half = make_construction(ConstructionKind.HALF_CURVED, n, G, lam)
        for k in (1, 2, 3):
            for eta in (0.01, 0.1):
                params = {'n': n, 'k': k, 'eta': eta, 'G': G, 'lambda': lam}
                rr = exact_moments(p, SamplingScheme.RANDOM_RESHUFFLE, eta, k, 1.0)
                results.append(agreement('reshuffle_second_moment', params,
                                         reshuffle_second_moment(n, k, eta, lam, G, 1.0),
                                         rr.mean_x_sq, ENGINE_RTOL))
                ss = exact_moments(p, SamplingScheme.SINGLE_SHUFFLE, eta, k, 1.0)
                results.append(agreement('single_shuffle_second_moment', params,
                                         single_shuffle_second_moment(n, k, eta, lam, G, 1.0),
                                         ss.mean_x_sq, ENGINE_RTOL))
                wr = exact_moments(p, SamplingScheme.WITH_REPLACEMENT, eta, k, 1.0)
                results.append(agreement('with_replacement_second_moment', params,
                                         with_replacement_second_moment(n, k, eta, lam, G, 1.0),
                                         wr.mean_x_sq, ENGINE_RTOL))
                hc = exact_moments(half, SamplingScheme.RANDOM_RESHUFFLE, eta, k, -1.0)
                results.append(agreement('half_curved_reshuffle', params,
                                         half_curved_reshuffle_moments(n, k, eta, lam, G, -1.0)[1],
                                         hc.mean_x_sq, ENGINE_RTOL))
    for n in _even_range(min(max_n, 64)):
        p = make_construction(ConstructionKind.CYCLIC_SPLIT, n, G, lam)
        eta = 0.1 / n
        k = 100
        exact = incremental_trajectory_exact(n, k, eta, lam, G, 1.0)
        engine = run_schedule(p, sample_schedule(SamplingScheme.INCREMENTAL, n, k, 0), eta, 1.0)
        # 轨迹可能穿过 0，按整条轨迹的尺度比较
        scale = max(1.0, max(abs(u) for u in exact))
        gap = max(abs(u - v) for u, v in zip(exact, engine.epoch_iterates)) / scale
        results.append(LemmaCheckResult('incremental_trajectory', {'n': n, 'k': k, 'eta': eta},
                                        exact_value=exact[-1], oracle_value=float(engine.epoch_iterates[-1]),
                                        satisfied=gap <= MOMENT_TOL))
    return results


def check_upper_bound_lemmas(max_n: int, seed: int) -> List[LemmaCheckResult]:
    """乘积求和差、X_σ 矩界与 Hoeffding-Serfling 界"""
    results = []
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    worst = 0.0
    all_ok = True
    for _ in range(1000):
        n = int(rng.integers(2, 65))
        check = product_sum_gap(rng.uniform(0.0, 1.0 / (10 * n), size=n))
        all_ok &= check.satisfied
        if check.bound > 0:
            worst = max(worst, check.gap / check.bound)
    results.append(LemmaCheckResult('product_sum_gap', {'vectors': 1000}, exact_value=worst,
                                    bound_value=1.0, satisfied=bool(all_ok), empirical_constant=worst))

    # 每 X_SIGMA_MC_EVERY 个实例中有一个改为 n = 32 的蒙特卡洛实例
    enumerable = _even_range(min(max_n, 8))
    for instance in range(X_SIGMA_INSTANCES):
        if instance % X_SIGMA_MC_EVERY == X_SIGMA_MC_EVERY - 1:
            n, mode = X_SIGMA_MC_N, 'monte_carlo'
        else:
            n, mode = enumerable[instance % len(enumerable)], 'enumerate'
        instance_seed = seed * 1000 + instance
        p = make_random_instance(n, 1.0, 4.0, 1.0, seed=instance_seed)
        eta = 0.4 / (n * p.L)
        check = x_sigma_moments(p, eta, mode, trials=X_SIGMA_MC_TRIALS, seed=instance_seed)
        # 两项检查共用同一个 params
        check.second.params.update({'instance': instance, 'samples': check.samples})
        results.extend([check.second, check.first])

    values = np.random.default_rng(np.random.SeedSequence(seed + 1)).uniform(0.0, 1.0, size=32)
    for delta in (0.1, 0.01):
        for j in (1, 8, 16, 31):
            rate = hoeffding_serfling_violation_rate(values, j, delta, samples=HOEFFDING_SAMPLES, seed=seed)
            results.append(LemmaCheckResult('hoeffding_serfling',
                                            {'n': 32, 'j': j, 'delta': delta, 'samples': HOEFFDING_SAMPLES},
                                            exact_value=rate, bound_value=delta, satisfied=rate <= delta,
                                            empirical_constant=rate / delta))
    return results


def run_lemma_suite(max_n: int = 16, seed: int = 0) -> List[LemmaCheckResult]:
    """
    运行全部引理检查

    Args:
        max_n (int): 枚举与网格使用的最大 n（偶数部分）
        seed (int): 随机实例与抽样的种子

    Returns:
        List[LemmaCheckResult]: 检查结果
    """
    if max_n < 2:
        raise ValueError(f"max_n 至少为 2，当前 max_n={max_n}")
    results = []
    for name, checks in (
            ('beta', lambda: check_beta(max_n)),
            ('pattern moments', lambda: check_pattern_moments(max_n)),
            ('monotonicity', lambda: check_monotone_term(max_n)),
            ('closed forms', lambda: check_closed_forms_against_engine(max_n)),
            ('upper-bound lemmas', lambda: check_upper_bound_lemmas(max_n, seed))):
        part = checks()
        failed = sum(not r.satisfied for r in part)
        logger.info("lemma group %s: %d checks, %d failed", name, len(part), failed)
        results.extend(part)
    return results
