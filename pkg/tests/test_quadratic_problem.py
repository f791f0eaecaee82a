import numpy as np
import pytest

from quadratic_problem import (
    ConstructionKind,
    FiniteSumProblem,
    OrderPattern,
    QuadraticComponent,
    make_construction,
    make_random_instance,
    problem_from_text,
    problem_to_text,
    recommended_start,
    suboptimality,
    validate,
    variant_mask,
    variant_summary,
)


def test_component_rejects_negative_curvature():
    with pytest.raises(ValueError):
        QuadraticComponent(-1.0, 0.0)


def test_problem_needs_positive_mean_curvature():
    with pytest.raises(ValueError):
        FiniteSumProblem.from_coefficients([0.0, 0.0], [1.0, -1.0])


def test_problem_derived_quantities():
    p = FiniteSumProblem.from_coefficients([1.0, 3.0], [2.0, -6.0])
    assert p.n == 2
    assert p.lambda_ == 2.0
    assert p.L == 3.0
    assert p.x_star == pytest.approx(1.0)
    # G 缺省取 x* 处的最大梯度
    assert p.G == pytest.approx(3.0)
    assert suboptimality(p, p.x_star) == 0.0
    assert suboptimality(p, 2.0) == pytest.approx(p.objective(2.0) - p.objective(1.0))


def test_signed_linear_coefficients():
    p = make_construction(ConstructionKind.SIGNED_LINEAR, 4, 6.0, 1.0)
    assert p.a.tolist() == [1.0, 1.0, 1.0, 1.0]
    assert p.b.tolist() == [3.0, 3.0, -3.0, -3.0]
    assert p.x_star == 0.0
    assert p.recommended_x0 == 1.0


def test_half_curved_has_half_mean_curvature():
    p = make_construction(ConstructionKind.HALF_CURVED, 6, 6.0, 1.0)
    assert p.lambda_ == pytest.approx(0.5)
    assert p.x_star == pytest.approx(0.0)
    assert p.recommended_x0 == -1.0
    assert variant_summary(p) == [(0.0, -3.0, 3), (1.0, 3.0, 3)]


def test_cyclic_split_alternating_order():
    p = make_construction(ConstructionKind.CYCLIC_SPLIT, 4, 6.0, 1.0, OrderPattern.ALTERNATING)
    assert p.a.tolist() == [0.0, 2.0, 0.0, 2.0]
    assert p.b.tolist() == [3.0, -3.0, 3.0, -3.0]
    assert p.lambda_ == 1.0
    assert variant_mask(4, OrderPattern.BLOCK_HALVES).tolist() == [True, True, False, False]


def test_recommended_start_matches_construction():
    for kind in ConstructionKind:
        assert make_construction(kind, 4, 6.0, 1.0).recommended_x0 == recommended_start(kind)


def test_odd_n_rejected_with_reduction_hint():
    with pytest.raises(ValueError, match="零函数"):
        make_construction(ConstructionKind.SIGNED_LINEAR, 5, 6.0, 1.0)


def test_construction_rejects_nonpositive_parameters():
    with pytest.raises(ValueError):
        make_construction(ConstructionKind.SIGNED_LINEAR, 4, 0.0, 1.0)
    with pytest.raises(ValueError):
        make_construction(ConstructionKind.SIGNED_LINEAR, 4, 6.0, -1.0)


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_random_instance_meets_assumptions(seed):
    p = make_random_instance(9, 1.0, 4.0, 2.0, seed)
    assert np.mean(p.a) == pytest.approx(1.0, rel=1e-12)
    assert p.L <= 4.0
    assert np.all(p.a >= 0)
    assert np.max(np.abs(p.b)) <= 2.0
    assert abs(p.b.sum()) < 1e-12
    assert p.x_star == pytest.approx(0.0, abs=1e-12)
    assert validate(p, 1.0, 4.0, 2.0).ok


def test_random_instance_is_seeded():
    assert make_random_instance(6, 1.0, 3.0, 1.0, 5) == make_random_instance(6, 1.0, 3.0, 1.0, 5)
    assert make_random_instance(6, 1.0, 3.0, 1.0, 5) != make_random_instance(6, 1.0, 3.0, 1.0, 6)


def test_random_instance_rejects_lambda_above_L():
    with pytest.raises(ValueError):
        make_random_instance(6, 2.0, 1.0, 1.0, 0)


def test_validate_lists_each_violation(random_instance):
    report = validate(random_instance, 2.0, 0.5, 0.01)
    assert not report.ok
    assert len(report.violations) == 3
    assert any('mean curvature' in v for v in report.violations)
    assert any('max curvature' in v for v in report.violations)
    assert any('gradient bound' in v for v in report.violations)


def test_text_round_trip(random_instance):
    restored = problem_from_text(problem_to_text(random_instance))
    assert restored == random_instance
    assert restored.provenance == random_instance.provenance


def test_explicit_gradient_bound_checked_at_construction():
    # x* = 1，分量梯度 (3, −3)
    with pytest.raises(ValueError, match="梯度界"):
        FiniteSumProblem.from_coefficients([1.0, 3.0], [2.0, -6.0], G=2.5)
    assert FiniteSumProblem.from_coefficients([1.0, 3.0], [2.0, -6.0], G=3.0).G == 3.0
    with pytest.raises(ValueError):
        FiniteSumProblem.from_coefficients([1.0, 1.0], [1.0, -1.0], G=float('nan'))


@pytest.mark.parametrize("seed", [0, 3, 11])
def test_random_instance_n_two_pins_curvature(seed):
    p = make_random_instance(2, 1.0, 1.0, 1.0, seed)
    assert p.a == pytest.approx([1.0, 1.0], abs=1e-12)
    c = p.b[0]
    assert p.b[1] == pytest.approx(-c, abs=1e-15)
    assert abs(c) <= 1.0


def test_suboptimality_is_scaled_squared_distance():
    rng = np.random.default_rng(2)
    problems = [
        make_random_instance(8, 1.0, 4.0, 2.0, seed=7),
        make_construction(ConstructionKind.HALF_CURVED, 4, 6.0, 1.0),
        FiniteSumProblem.from_coefficients([1.0, 3.0], [2.0, -6.0]),
    ]
    for p in problems:
        assert validate(p, p.lambda_, p.L, p.G).ok
        for x in rng.uniform(-10.0, 10.0, size=100):
            expected = 0.5 * np.mean(p.a) * (x - p.x_star) ** 2
            assert suboptimality(p, x) == pytest.approx(expected, rel=1e-12, abs=1e-12)
            assert suboptimality(p, x) == pytest.approx(p.objective(x) - p.objective(p.x_star),
                                                        rel=1e-9, abs=1e-9)
