import numpy as np
import pytest

from analytic_oracles import (
    beta_closed_form,
    beta_enumerated,
    beta_lower_envelope,
    check_monotonicity,
    geometric_sum,
    hoeffding_serfling_bound,
    hoeffding_serfling_violation_rate,
    half_curved_reshuffle_moments,
    incremental_fixed_point,
    incremental_iterate_exact,
    incremental_trajectory_exact,
    lemma_frame,
    one_minus_power,
    product_sum_gap,
    run_lemma_suite,
    sign_moment,
    sign_moment_enumerated,
    two_variant_epoch_moments,
    signed_prefix_expectation,
    signed_prefix_expectation_enumerated,
    stated_signed_prefix_expectation,
    x_sigma,
    x_sigma_moments,
    zero_one_moment,
    zero_one_moment_enumerated,
)
from quadratic_problem import FiniteSumProblem
from sgd_engine import SamplingScheme, Schedule, run_schedule


def test_geometric_sum_small_alpha_is_accurate():
    # Σ_{i<4} (1−α)^i，α 很小时接近 4
    assert geometric_sum(1e-10, 1, 4) == pytest.approx(4.0 - 6e-10, rel=1e-14)
    assert one_minus_power(1e-10, 3) == pytest.approx(3e-10, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 1.9])
def test_beta_n_two(alpha):
    assert beta_closed_form(2, alpha) == pytest.approx(alpha * alpha, rel=1e-14)


@pytest.mark.parametrize("n", [2, 4, 10])
def test_beta_alpha_one(n):
    assert beta_closed_form(n, 1.0) == 1.0


@pytest.mark.parametrize("n", [4, 6, 12])
@pytest.mark.parametrize("alpha", [1e-5, 0.01, 0.3, 1.5])
def test_beta_closed_form_matches_enumeration(n, alpha):
    assert beta_closed_form(n, alpha) == pytest.approx(beta_enumerated(n, alpha), rel=1e-11)


def test_beta_stays_above_envelope_fraction():
    n = 8
    ratios = [beta_closed_form(n, a) / beta_lower_envelope(n, a) for a in np.logspace(-5, 0, 40)]
    assert min(ratios) > 0
    assert max(ratios) / min(ratios) < 1e3


def test_beta_rejects_odd_n():
    with pytest.raises(ValueError):
        beta_closed_form(5, 0.1)


def test_pairwise_moments():
    assert sign_moment(4, 0, 1) == pytest.approx(-1.0 / 3.0)
    assert sign_moment(4, 2, 2) == 1.0
    assert sign_moment_enumerated(4, 0, 1) == pytest.approx(-1.0 / 3.0, abs=1e-15)
    assert zero_one_moment(4, 0, 3) == pytest.approx(1.0 / 6.0)
    assert zero_one_moment(4, 1, 1) == 0.5
    assert zero_one_moment_enumerated(4, 0, 3) == pytest.approx(1.0 / 6.0, abs=1e-15)


def test_signed_prefix_n_two():
    assert signed_prefix_expectation(2, 0.3) == pytest.approx(-0.15)
    assert signed_prefix_expectation_enumerated(2, 0.3) == pytest.approx(-0.15, abs=1e-15)


@pytest.mark.parametrize("n", [4, 8])
def test_signed_prefix_matches_enumeration_not_stated_form(n):
    eta_lambda = 0.2
    value = signed_prefix_expectation(n, eta_lambda)
    assert value == pytest.approx(signed_prefix_expectation_enumerated(n, eta_lambda), abs=1e-13)
    assert stated_signed_prefix_expectation(n, eta_lambda) < value


@pytest.mark.parametrize("n", [2, 4, 16])
def test_monotone_term(n):
    assert check_monotonicity(n)


def test_incremental_trajectory_reaches_fixed_point():
    n, eta, lam, G = 8, 0.01, 1.0, 6.0
    xs = incremental_trajectory_exact(n, 4000, eta, lam, G, 1.0)
    assert xs[-1] == pytest.approx(incremental_fixed_point(n, eta, lam, G), rel=1e-9)
    assert incremental_trajectory_exact(2, 2, 0.1, 1.0, 2.0, 1.0) == pytest.approx([0.82, 0.676], abs=1e-15)


def test_product_sum_gap():
    check = product_sum_gap([0.01, 0.02, 0.005, 0.0])
    assert check.satisfied
    assert check.gap <= check.bound
    with pytest.raises(ValueError):
        product_sum_gap([0.5, 0.5])


def test_x_sigma_is_scaled_epoch_end(random_instance):
    eta = 0.05
    sigma = [2, 0, 1, 5, 4, 3]
    s = Schedule(SamplingScheme.INCREMENTAL, 6, 1, np.array(sigma) + 1, None)
    x_end = run_schedule(random_instance, s, eta, x0=0.0).epoch_iterates[0]
    assert x_end == pytest.approx(-eta * x_sigma(random_instance, sigma, eta), rel=1e-12)


def test_x_sigma_requires_zero_sum():
    shifted = FiniteSumProblem.from_coefficients([1.0, 1.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        x_sigma(shifted, [0, 1], 0.1)


def test_x_sigma_moment_bounds(random_instance):
    eta = 0.4 / (random_instance.n * random_instance.L)
    check = x_sigma_moments(random_instance, eta)
    assert check.samples == 720
    assert check.satisfied
    assert check.second_moment <= check.worst_case_bound


def test_x_sigma_monte_carlo_close_to_enumeration(random_instance):
    eta = 0.05
    exact = x_sigma_moments(random_instance, eta)
    mc = x_sigma_moments(random_instance, eta, mode='monte_carlo', trials=50_000, seed=2)
    assert abs(mc.second_moment - exact.second_moment) <= 5 * mc.second_stderr


def test_hoeffding_serfling_bound_edges():
    assert hoeffding_serfling_bound(10, 10, 0.1, 1.0) == 0.0
    assert hoeffding_serfling_bound(10, 1, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        hoeffding_serfling_bound(10, 11, 0.1, 1.0)


def test_hoeffding_serfling_rate_below_delta():
    values = np.linspace(0.0, 1.0, 20)
    assert hoeffding_serfling_violation_rate(values, 5, 0.05, samples=10_000, seed=0) <= 0.05


def test_lemma_suite_small_n_all_satisfied():
    frame = lemma_frame(run_lemma_suite(max_n=4, seed=0))
    failed = frame[~frame['satisfied']]
    assert failed.empty, failed[['lemma_id', 'params']].to_string()
    assert {'beta_oracle', 'signed_prefix', 'reshuffle_second_moment', 'incremental_trajectory',
            'x_sigma_second_moment', 'hoeffding_serfling'} <= set(frame['lemma_id'])


@pytest.mark.parametrize("n, k, eta", [(2, 2, 0.1), (8, 37, 0.01), (64, 500, 1e-4), (16, 9, 0.7)])
def test_incremental_closed_form_matches_trajectory(n, k, eta):
    xs = incremental_trajectory_exact(n, k, eta, 1.0, 6.0, 1.0)
    assert incremental_iterate_exact(n, k, eta, 1.0, 6.0, 1.0) == pytest.approx(xs[-1], rel=1e-10, abs=1e-14)
    assert incremental_iterate_exact(n, 0, eta, 1.0, 6.0, 1.0) == 1.0


def test_incremental_closed_form_cost_independent_of_k():
    # 2^29 轮，逐轮递推不可行
    x = incremental_iterate_exact(64, 2 ** 29, 1e-9, 1.0, 6.0, 1.0)
    assert np.isfinite(x)
    assert x > 0


@pytest.mark.parametrize("n, k, eta", [(2, 3, 0.3), (4, 7, 0.05), (8, 25, 0.01)])
def test_half_curved_matrix_power_matches_recursion(n, k, eta):
    lam, G = 1.0, 6.0
    mom = two_variant_epoch_moments(n, (1.0 - eta * lam, -eta * G / 2.0), (1.0, eta * G / 2.0))
    m1, m2 = -1.0, 1.0
    for _ in range(k):
        m1, m2 = mom['A'] * m1 + mom['c'], mom['A2'] * m2 + 2.0 * mom['Ac'] * m1 + mom['c2']
    assert half_curved_reshuffle_moments(n, k, eta, lam, G, -1.0) == pytest.approx((m1, m2), rel=1e-10)
    assert half_curved_reshuffle_moments(n, 0, eta, lam, G, -1.0) == pytest.approx((-1.0, 1.0))


def test_upper_bound_lemmas_run_at_full_scale():
    results = run_lemma_suite(max_n=4, seed=0)
    second = [r for r in results if r.lemma_id == 'x_sigma_second_moment']
    assert len(second) == 100
    by_mode = {}
    for r in second:
        by_mode.setdefault(r.params['mode'], []).append(r)
    assert all(r.params['n'] <= 8 for r in by_mode['enumerate'])
    assert {r.params['n'] for r in by_mode['monte_carlo']} == {32}
    assert all(r.params['samples'] == 100_000 for r in by_mode['monte_carlo'])
    assert all(r.satisfied for r in second)
    hs = [r for r in results if r.lemma_id == 'hoeffding_serfling']
    assert {r.params['delta'] for r in hs} == {0.1, 0.01}
    assert all(r.params['samples'] == 100_000 and r.satisfied for r in hs)
