import math

import numpy as np
import pytest

from src.core.errors import DomainError, ShapeMismatchError
from src.core.model import (
    ModelParams,
    SystemState,
    WeightSpec,
    eval_weight,
    rhs,
    validate_params,
    weight_integral,
    weight_is_long_ranged,
)


@pytest.mark.parametrize(
    "spec, r, expected",
    [
        (WeightSpec.constant(2.0), 5.0, 2.0),
        (WeightSpec.power_law(1.0, 0.5), 0.0, 1.0),
        (WeightSpec.power_law(1.0, 1.0), 1.0, 0.5),
        (WeightSpec.power_law(3.0, 0.4), 2.0, 3.0 / 5.0**0.4),
        (WeightSpec.exponential(1.0, 2.0), 1.0, math.exp(-2.0)),
    ],
)
def test_eval_weight_values(spec, r, expected):
    assert eval_weight(spec, r) == pytest.approx(expected, rel=1e-14)
    assert isinstance(eval_weight(spec, r), float)


def test_eval_weight_arrays_and_domain():
    r = np.array([[0.0, 1.0], [2.0, 3.0]])
    out = eval_weight(WeightSpec.exponential(1.0, 1.0), r)
    assert out.shape == (2, 2)
    np.testing.assert_allclose(out, np.exp(-r))
    with pytest.raises(DomainError):
        eval_weight(WeightSpec.constant(), -1e-3)


def test_weights_are_nonincreasing():
    r = np.linspace(0.0, 10.0, 201)
    for spec in (WeightSpec.power_law(1.0, 0.4), WeightSpec.exponential(2.0, 0.7)):
        assert np.all(np.diff(eval_weight(spec, r)) <= 0)


@pytest.mark.parametrize(
    "spec, a, b, expected",
    [
        (WeightSpec.constant(2.0), 1.0, 4.0, 6.0),
        (WeightSpec.exponential(1.0, 1.0), 0.0, math.inf, 1.0),
        (WeightSpec.exponential(2.0, 0.5), 1.0, 3.0, 4.0 * (math.exp(-0.5) - math.exp(-1.5))),
        (WeightSpec.power_law(1.0, 1.0), 0.0, math.inf, math.pi / 2),
        (WeightSpec.power_law(1.0, 0.5), 0.0, 1.0, math.asinh(1.0)),
    ],
)
def test_weight_integral_closed_forms(spec, a, b, expected):
    assert weight_integral(spec, a, b) == pytest.approx(expected, rel=1e-12)


def test_weight_integral_quadrature_and_tails():
    spec = WeightSpec.power_law(1.0, 0.75)
    grid = np.linspace(0.5, 2.0, 200001)
    trapezoid = float(np.sum((eval_weight(spec, grid[1:]) + eval_weight(spec, grid[:-1])) / 2 * np.diff(grid)))
    assert weight_integral(spec, 0.5, 2.0) == pytest.approx(trapezoid, rel=1e-9)
    assert math.isfinite(weight_integral(spec, 0.0, math.inf))

    assert weight_integral(WeightSpec.power_law(1.0, 0.4), 0.0, math.inf) == math.inf
    assert weight_integral(WeightSpec.constant(), 3.0, 3.0) == 0.0
    with pytest.raises(DomainError):
        weight_integral(WeightSpec.constant(), 2.0, 1.0)


def test_long_range_classification():
    assert weight_is_long_ranged(WeightSpec.constant())
    assert weight_is_long_ranged(WeightSpec.power_law(1.0, 0.5))
    assert not weight_is_long_ranged(WeightSpec.power_law(1.0, 0.6))
    assert not weight_is_long_ranged(WeightSpec.exponential(1.0, 0.1))


def test_validate_params_lists_violations():
    good = ModelParams(n1=2, n2=3, dim=2, kappa_s=1.0, kappa_d=1.0)
    assert validate_params(good) == []

    bad = ModelParams(n1=0, n2=3, dim=2, kappa_s=-1.0, kappa_d=1.0, psi_d=WeightSpec.constant(0.0))
    violations = validate_params(bad)
    assert "n1 ≥ 1" in violations
    assert "kappa_s ≥ 0" in violations
    assert "psi_d.amplitude > 0" in violations


def test_state_is_read_only_copy():
    x = np.zeros((2, 2))
    state = SystemState(x=x, v=np.ones((2, 2)), y=np.zeros((1, 2)), w=np.zeros((1, 2)))
    x[0, 0] = 5.0
    assert state.x[0, 0] == 0.0
    with pytest.raises(ValueError):
        state.v[0, 0] = 3.0


def test_state_shape_checks():
    with pytest.raises(ShapeMismatchError):
        SystemState(x=np.zeros((2, 2)), v=np.zeros((3, 2)), y=np.zeros((1, 2)), w=np.zeros((1, 2)))
    with pytest.raises(ShapeMismatchError):
        SystemState(x=np.zeros(2), v=np.zeros(2), y=np.zeros((1, 2)), w=np.zeros((1, 2)))

    state = SystemState(x=np.zeros((2, 3)), v=np.zeros((2, 3)), y=np.zeros((1, 3)), w=np.zeros((1, 3)))
    with pytest.raises(ShapeMismatchError):
        state.check_shape(ModelParams(n1=2, n2=1, dim=2, kappa_s=1.0, kappa_d=1.0))


def test_flat_round_trip(mixed_state, mixed_params):
    flat = mixed_state.to_flat()
    assert flat.shape == (2 * (6 + 5) * 2,)
    back = SystemState.from_flat(flat, mixed_params.n1, mixed_params.n2, mixed_params.dim)
    np.testing.assert_array_equal(back.w, mixed_state.w)
    with pytest.raises(ShapeMismatchError):
        SystemState.from_flat(flat[:-1], mixed_params.n1, mixed_params.n2, mixed_params.dim)


def test_rhs_two_particles_repel(make_pair):
    params = ModelParams(n1=1, n2=1, dim=2, kappa_s=5.0, kappa_d=1.0, psi_d=WeightSpec.constant(1.0))
    state = make_pair([0.0, 0.0], [1.0, 0.0], [3.0, 0.0], [0.0, 0.0])
    deriv = rhs(state, params)
    np.testing.assert_allclose(deriv.v_dot, [[1.0, 0.0]])
    np.testing.assert_allclose(deriv.w_dot, [[-1.0, 0.0]])
    np.testing.assert_array_equal(deriv.x_dot, state.v)


def test_rhs_rayleigh_friction(make_pair):
    params = ModelParams(n1=1, n2=1, dim=2, kappa_s=1.0, kappa_d=0.0, delta=1.0)
    state = make_pair([0.0, 0.0], [2.0, 0.0], [5.0, 0.0], [0.0, 0.5])
    deriv = rhs(state, params)
    np.testing.assert_allclose(deriv.v_dot, [[-6.0, 0.0]])
    np.testing.assert_allclose(deriv.w_dot, [[0.0, 0.375]])


def test_rhs_conserves_total_momentum_without_friction(mixed_state, mixed_params):
    from dataclasses import replace

    params = replace(mixed_params, delta=0.0)
    deriv = rhs(mixed_state, params)
    total = deriv.v_dot.mean(axis=0) + deriv.w_dot.mean(axis=0)
    np.testing.assert_allclose(total, 0.0, atol=1e-13)


def test_rhs_rejects_foreign_state(mixed_state):
    params = ModelParams(n1=2, n2=2, dim=2, kappa_s=1.0, kappa_d=1.0)
    with pytest.raises(ShapeMismatchError):
        rhs(mixed_state, params)


def test_rhs_is_equivariant_under_relabelling_within_a_group(mixed_state, mixed_params):
    p1, p2 = np.array([3, 0, 5, 1, 4, 2]), np.array([4, 2, 0, 3, 1])
    shuffled = mixed_state.with_arrays(
        x=mixed_state.x[p1], v=mixed_state.v[p1], y=mixed_state.y[p2], w=mixed_state.w[p2]
    )
    base, moved = rhs(mixed_state, mixed_params), rhs(shuffled, mixed_params)
    np.testing.assert_allclose(moved.v_dot, base.v_dot[p1], rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(moved.w_dot, base.w_dot[p2], rtol=1e-12, atol=1e-14)


def test_rhs_ignores_a_common_shift(mixed_state, mixed_params):
    from dataclasses import replace

    shift = np.array([2.5, -1.0])
    base = rhs(mixed_state, mixed_params)
    moved = rhs(mixed_state.with_arrays(x=mixed_state.x + shift, y=mixed_state.y + shift), mixed_params)
    np.testing.assert_allclose(moved.to_flat(), base.to_flat(), rtol=1e-12, atol=1e-14)

    # without friction a common velocity boost changes nothing but the drift of positions
    params = replace(mixed_params, delta=0.0, psi_s=WeightSpec.constant(1.0), psi_d=WeightSpec.constant(0.5))
    still = rhs(mixed_state, params)
    boosted = rhs(mixed_state.with_arrays(v=mixed_state.v + shift, w=mixed_state.w + shift), params)
    np.testing.assert_allclose(boosted.v_dot, still.v_dot, atol=1e-12)
    np.testing.assert_allclose(boosted.w_dot, still.w_dot, atol=1e-12)
