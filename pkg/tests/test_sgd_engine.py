import numpy as np
import pytest

from analytic_oracles import (
    balanced_indicator_patterns,
    reshuffle_second_moment,
    single_shuffle_second_moment,
    two_variant_epoch_moments,
    with_replacement_second_moment,
)
from quadratic_problem import ConstructionKind, make_construction
from sgd_engine import (
    SamplingScheme,
    Schedule,
    all_permutations,
    estimate_frame,
    estimate_suboptimality,
    exact_moments,
    final_iterates,
    run_schedule,
    sample_schedule,
    trajectory_frame,
)


def test_scheme_aliases():
    assert SamplingScheme.parse('random-reshuffle') is SamplingScheme.RANDOM_RESHUFFLE
    assert SamplingScheme.parse('RR') is SamplingScheme.RANDOM_RESHUFFLE
    assert SamplingScheme.parse('cyclic') is SamplingScheme.INCREMENTAL
    with pytest.raises(ValueError):
        SamplingScheme.parse('shuffled')


def test_schedule_shapes_per_scheme():
    n, k = 5, 6
    rr = sample_schedule(SamplingScheme.RANDOM_RESHUFFLE, n, k, seed=11).blocks()
    assert all(sorted(row) == list(range(1, n + 1)) for row in rr.tolist())
    assert len({tuple(row) for row in rr.tolist()}) > 1

    ss = sample_schedule(SamplingScheme.SINGLE_SHUFFLE, n, k, seed=11).blocks()
    assert sorted(ss[0].tolist()) == list(range(1, n + 1))
    assert (ss == ss[0]).all()

    inc = sample_schedule(SamplingScheme.INCREMENTAL, n, k, seed=11).blocks()
    assert (inc == np.arange(1, n + 1)).all()

    wr = sample_schedule(SamplingScheme.WITH_REPLACEMENT, n, k, seed=11).indices
    assert wr.min() >= 1 and wr.max() <= n


def test_schedule_is_seeded():
    a = sample_schedule(SamplingScheme.RANDOM_RESHUFFLE, 8, 4, seed=3).indices
    b = sample_schedule(SamplingScheme.RANDOM_RESHUFFLE, 8, 4, seed=3).indices
    c = sample_schedule(SamplingScheme.RANDOM_RESHUFFLE, 8, 4, seed=4).indices
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_schedule_rejects_bad_sizes():
    with pytest.raises(ValueError):
        sample_schedule(SamplingScheme.INCREMENTAL, 1, 4, seed=0)
    with pytest.raises(ValueError):
        sample_schedule(SamplingScheme.INCREMENTAL, 4, 0, seed=0)


def test_all_permutations_count():
    perms = all_permutations(4)
    assert perms.shape == (24, 4)
    assert len({tuple(p) for p in perms.tolist()}) == 24


def test_two_step_orders_by_hand(signed_linear_two):
    # (1, 2): 1 → 0 → 0.5；(2, 1): 1 → 1 → 0
    first = Schedule(SamplingScheme.INCREMENTAL, 2, 1, np.array([1, 2]), None)
    second = Schedule(SamplingScheme.INCREMENTAL, 2, 1, np.array([2, 1]), None)
    assert run_schedule(signed_linear_two, first, 0.5).epoch_iterates[0] == pytest.approx(0.5)
    assert run_schedule(signed_linear_two, second, 0.5).epoch_iterates[0] == pytest.approx(0.0)


def test_pinned_exact_moments(signed_linear_two):
    rr = exact_moments(signed_linear_two, SamplingScheme.RANDOM_RESHUFFLE, 0.5, 1)
    assert rr.mean_x_sq == pytest.approx(0.125, abs=1e-15)
    assert rr.schedules == 2
    ss = exact_moments(signed_linear_two, SamplingScheme.SINGLE_SHUFFLE, 0.5, 2)
    assert ss.mean_x_sq == pytest.approx(0.1015625, abs=1e-15)


def test_incremental_cyclic_split_trajectory():
    p = make_construction(ConstructionKind.CYCLIC_SPLIT, 2, 2.0, 1.0)
    traj = run_schedule(p, sample_schedule(SamplingScheme.INCREMENTAL, 2, 2, seed=0), 0.1)
    assert traj.epoch_iterates.tolist() == pytest.approx([0.82, 0.676], abs=1e-15)
    assert not traj.diverged


def test_divergence_is_reported(signed_linear_four):
    s = sample_schedule(SamplingScheme.INCREMENTAL, 4, 200, seed=0)
    traj = run_schedule(signed_linear_four, s, 5.0)
    assert traj.diverged
    assert np.isinf(traj.epoch_iterates[-1])
    assert np.all(np.isfinite(traj.epoch_iterates[:traj.diverged_epoch - 1]))


def test_nonpositive_step_rejected(signed_linear_four):
    s = sample_schedule(SamplingScheme.INCREMENTAL, 4, 1, seed=0)
    with pytest.raises(ValueError):
        run_schedule(signed_linear_four, s, 0.0)


def test_trace_matches_epoch_ends(signed_linear_four):
    s = sample_schedule(SamplingScheme.RANDOM_RESHUFFLE, 4, 3, seed=1)
    traj = run_schedule(signed_linear_four, s, 0.1, keep_trace=True)
    assert traj.trace[3::4].tolist() == traj.epoch_iterates.tolist()
    frame = trajectory_frame(signed_linear_four, traj)
    assert frame['epoch'].tolist() == [1, 2, 3]


@pytest.mark.parametrize("scheme, oracle", [
    (SamplingScheme.RANDOM_RESHUFFLE, reshuffle_second_moment),
    (SamplingScheme.SINGLE_SHUFFLE, single_shuffle_second_moment),
    (SamplingScheme.WITH_REPLACEMENT, with_replacement_second_moment),
])
def test_exact_moments_match_closed_forms(signed_linear_four, scheme, oracle):
    for k in (1, 3):
        for eta in (0.02, 0.3):
            exact = exact_moments(signed_linear_four, scheme, eta, k).mean_x_sq
            assert exact == pytest.approx(oracle(4, k, eta, 1.0, 6.0, 1.0), rel=1e-11)


def test_monte_carlo_within_four_standard_errors(signed_linear_four):
    eta, k = 0.1, 2
    exact = exact_moments(signed_linear_four, SamplingScheme.RANDOM_RESHUFFLE, eta, k)
    est = estimate_suboptimality(signed_linear_four, SamplingScheme.RANDOM_RESHUFFLE, eta, k,
                                 trials=20_000, seed=5)
    assert not est.diverged
    assert abs(est.mean_subopt - exact.mean_subopt) <= 4 * est.stderr_subopt


def test_incremental_estimate_runs_once(signed_linear_four):
    est = estimate_suboptimality(signed_linear_four, SamplingScheme.INCREMENTAL, 0.1, 3, trials=500, seed=0)
    assert est.trials == 1
    assert est.stderr_subopt == 0.0


def test_worker_count_does_not_change_results(signed_linear_four):
    etas = [0.01, 0.1]
    single = final_iterates(signed_linear_four, SamplingScheme.RANDOM_RESHUFFLE, etas, 3, 5000, seed=9)
    pooled = final_iterates(signed_linear_four, SamplingScheme.RANDOM_RESHUFFLE, etas, 3, 5000, seed=9,
                            workers=2)
    assert single.shape == (2, 5000)
    assert np.array_equal(single, pooled)


def test_two_variant_dp_matches_pattern_enumeration():
    n = 4
    first, second = (0.9, -0.3), (1.0, 0.3)
    A, c = [], []
    for pattern in balanced_indicator_patterns(n):
        a_val, c_val = 1.0, 0.0
        for is_first in pattern:
            m, d = first if is_first else second
            a_val, c_val = m * a_val, m * c_val + d
        A.append(a_val)
        c.append(c_val)
    A, c = np.array(A), np.array(c)
    mom = two_variant_epoch_moments(n, first, second)
    assert mom['A'] == pytest.approx(A.mean(), rel=1e-13)
    assert mom['c'] == pytest.approx(c.mean(), rel=1e-13)
    assert mom['A2'] == pytest.approx((A * A).mean(), rel=1e-13)
    assert mom['Ac'] == pytest.approx((A * c).mean(), rel=1e-13)
    assert mom['c2'] == pytest.approx((c * c).mean(), rel=1e-13)


def test_estimate_frame_marks_exact_rows(signed_linear_four):
    exact = exact_moments(signed_linear_four, SamplingScheme.SINGLE_SHUFFLE, 0.1, 2)
    est = estimate_suboptimality(signed_linear_four, SamplingScheme.SINGLE_SHUFFLE, 0.1, 2, trials=100, seed=0)
    frame = estimate_frame([exact, est])
    assert frame['trial_or_exact'].tolist() == ['exact', 'mean']
    assert frame['trials'].tolist() == [24, 100]


def test_parse_accepts_enum_members():
    for scheme in SamplingScheme:
        assert SamplingScheme.parse(scheme) is scheme


@pytest.mark.parametrize("scheme", [
    SamplingScheme.RANDOM_RESHUFFLE,
    SamplingScheme.SINGLE_SHUFFLE,
    SamplingScheme.WITH_REPLACEMENT,
])
def test_first_epoch_mean_has_no_bias(scheme):
    # 符号对称: E[x_1] = (1−ηλ)^n·x0
    p = make_construction(ConstructionKind.SIGNED_LINEAR, 8, 6.0, 1.0)
    eta = 0.05
    est = estimate_suboptimality(p, scheme, eta, 1, trials=100_000, seed=13, x0=1.0)
    assert abs(est.mean_x - (1.0 - eta) ** 8) <= 4 * est.stderr_x


def test_reshuffle_blocks_split_evenly():
    blocks = sample_schedule(SamplingScheme.RANDOM_RESHUFFLE, 2, 1000, seed=21).blocks()
    fraction = float(np.mean(blocks[:, 0] == 1))
    assert fraction == pytest.approx(0.5, abs=0.05)


def test_monte_carlo_matches_exact_at_eight_components():
    n, k, eta = 8, 5, 0.01
    p = make_construction(ConstructionKind.SIGNED_LINEAR, n, 6.0, 1.0)
    for scheme, oracle in ((SamplingScheme.RANDOM_RESHUFFLE, reshuffle_second_moment),
                           (SamplingScheme.SINGLE_SHUFFLE, single_shuffle_second_moment)):
        est = estimate_suboptimality(p, scheme, eta, k, trials=100_000, seed=17, x0=1.0)
        expected = oracle(n, k, eta, 1.0, 6.0, 1.0)
        assert abs(est.mean_x_sq - expected) <= 4 * est.stderr_x_sq
