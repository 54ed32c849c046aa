from dataclasses import replace

import numpy as np
import pytest

from src.core.diagnostics import (
    center_gap_rate,
    center_gap_rate_formula,
    compute_frame,
    detect_stages,
    diameters,
    flocking_report,
    fluctuation_energy,
    fluctuation_energy_rate,
    micro_macro,
    moment_rates,
    moments,
    tail_linear_fit,
)
from src.core.errors import PreconditionError
from src.core.integrator import Trajectory, rk4_step
from src.core.model import ModelParams, SystemState, WeightSpec, rhs


def test_moments_and_center_separation(make_pair):
    state = make_pair([0.0, 0.0], [3.0, 4.0], [1.0, 1.0], [0.0, -1.0])
    m1_v, m1_w, m2_v, m2_w, m2 = moments(state)
    np.testing.assert_allclose(m1_v, [3.0, 4.0])
    assert (m2_v, m2_w, m2) == (25.0, 1.0, 26.0)
    params = ModelParams(n1=1, n2=1, dim=2, kappa_s=1.0, kappa_d=1.0)
    frame = compute_frame(state, params)
    assert frame.center_sep == pytest.approx(np.hypot(3.0, 5.0))
    assert frame.m2_hat == 0.0
    assert frame.dx == frame.dv == 0.0
    assert frame.min_inter_dist == pytest.approx(np.sqrt(2.0))


def test_micro_macro_fluctuations_have_zero_mean(mixed_state):
    mm = micro_macro(mixed_state)
    np.testing.assert_allclose(mm.v_hat.mean(axis=0), 0.0, atol=1e-15)
    np.testing.assert_allclose(mm.y_hat.mean(axis=0), 0.0, atol=1e-15)
    energy = np.sum(mm.v_hat**2) / mixed_state.n1 + np.sum(mm.w_hat**2) / mixed_state.n2
    assert fluctuation_energy(mixed_state) == pytest.approx(energy)


def test_diameters_are_max_pair_distances():
    state = SystemState(
        x=[[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]],
        v=[[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]],
        y=[[0.0, 0.0]],
        w=[[2.0, 2.0]],
    )
    assert diameters(state) == (5.0, 0.0, 0.0, 0.0)


def test_extremal_weights_follow_distance_extremes(mixed_state, mixed_params):
    frame = compute_frame(mixed_state, mixed_params)
    assert frame.psi_d_upper == pytest.approx(mixed_params.psi_d(frame.min_inter_dist))
    assert frame.psi_d_lower == pytest.approx(mixed_params.psi_d(frame.max_inter_dist))
    assert frame.psi_s_lower == pytest.approx(mixed_params.psi_s(max(frame.dx, frame.dy)))
    assert frame.psi_s_lower <= frame.psi_s_upper <= mixed_params.psi_s.amplitude
    assert frame.min_inter_speed <= frame.max_inter_speed


def synthetic_trajectory(state, params, times, **series) -> Trajectory:
    base = compute_frame(state, params)
    frames = [replace(base, **{name: values[k] for name, values in series.items()}) for k in range(len(times))]
    return Trajectory(times=list(times), states=[state] * len(times), frames=frames)


def test_stage_detection_interpolates_the_final_crossing(mixed_state, mixed_params):
    trajectory = synthetic_trajectory(
        mixed_state,
        mixed_params,
        [0.0, 1.0, 2.0, 3.0],
        min_inter_speed=[0.2, 0.05, 0.2, 0.3],
        min_inter_dist=[0.0, 0.1, 0.3, 0.7],
        m2_hat=[1.0, 1e-2, 1e-3, 1e-3],
    )
    stages = detect_stages(trajectory, (0.1, 0.5, 1e-4))
    assert stages.t_velocity_sep == pytest.approx(1.0 + 1.0 / 3.0)
    assert stages.t_spatial_sep == pytest.approx(2.5)
    assert stages.t_flock is None
    assert stages.eps_f == 1e-4


def test_stage_detection_from_the_start(mixed_state, mixed_params):
    trajectory = synthetic_trajectory(
        mixed_state, mixed_params, [0.0, 1.0], min_inter_speed=[1.0, 2.0], min_inter_dist=[1.0, 2.0], m2_hat=[0.0, 0.0]
    )
    stages = detect_stages(trajectory)
    assert (stages.t_velocity_sep, stages.t_spatial_sep, stages.t_flock) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("use_fixture", [False, True])
def test_velocity_separation_time_grows_with_the_threshold(use_fixture, mixed_state, mixed_params, constant_inter_trajectory):
    if use_fixture:
        trajectory = constant_inter_trajectory
    else:
        speeds = [0.0, 0.3, 0.1, 0.4, 0.25, 0.6, 0.9, 1.2]
        trajectory = synthetic_trajectory(
            mixed_state, mixed_params, [0.5 * k for k in range(len(speeds))], min_inter_speed=speeds
        )
    times = []
    for eps_v in [0.05, 0.1, 0.2, 0.35, 0.5, 1.0]:
        t = detect_stages(trajectory, (eps_v, 0.5, 1e-4)).t_velocity_sep
        times.append(np.inf if t is None else t)
    assert all(a <= b for a, b in zip(times, times[1:]))


def test_stage_detection_needs_samples():
    with pytest.raises(PreconditionError):
        detect_stages(Trajectory())


def test_tail_linear_fit_recovers_a_line():
    times = np.linspace(0.0, 9.0, 10)
    slope, intercept = tail_linear_fit(times, 2.0 * times + 1.0)
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(1.0)
    assert tail_linear_fit(np.array([0.0, 1.0]), np.array([0.0, 1.0]), fraction=0.1) is None


def test_flocking_report_on_separating_groups(constant_inter_trajectory, constant_inter_params):
    report = flocking_report(constant_inter_trajectory, constant_inter_params)
    assert report.terminal_dv < constant_inter_trajectory.frames[0].dv
    assert report.sup_dx >= constant_inter_trajectory.frames[0].dx
    assert report.separation_rate > 0


def test_moment_rates_match_rhs(mixed_state, mixed_params):
    deriv = rhs(mixed_state, mixed_params)
    rates = moment_rates(mixed_state, mixed_params)
    expected_dm1 = deriv.v_dot.mean(axis=0) + deriv.w_dot.mean(axis=0)
    expected_dm2 = (
        2.0 * np.sum(mixed_state.v * deriv.v_dot) / mixed_state.n1
        + 2.0 * np.sum(mixed_state.w * deriv.w_dot) / mixed_state.n2
    )
    np.testing.assert_allclose(rates.dm1, expected_dm1, atol=1e-12)
    assert rates.dm2 == pytest.approx(expected_dm2, rel=1e-10, abs=1e-12)


def test_fluctuation_energy_rate_matches_finite_difference(mixed_state, mixed_params):
    h = 1e-6
    forward = fluctuation_energy(rk4_step(mixed_state, mixed_params, h))
    difference = (forward - fluctuation_energy(mixed_state)) / h
    assert fluctuation_energy_rate(mixed_state, mixed_params) == pytest.approx(difference, rel=1e-4, abs=1e-8)


def test_center_gap_formula_matches_rhs(mixed_state, mixed_params):
    deriv = rhs(mixed_state, mixed_params)
    expected = deriv.v_dot.mean(axis=0) - deriv.w_dot.mean(axis=0)
    np.testing.assert_allclose(center_gap_rate_formula(mixed_state, mixed_params), expected, atol=1e-12)

    u = mixed_state.v.mean(axis=0) - mixed_state.w.mean(axis=0)
    assert center_gap_rate(mixed_state, mixed_params) == pytest.approx(u @ expected / np.linalg.norm(u), abs=1e-12)


def test_constant_inter_gap_grows_at_twice_kappa_d(make_pair):
    params = ModelParams(n1=1, n2=1, dim=2, kappa_s=1.0, kappa_d=0.7, psi_d=WeightSpec.constant(1.0))
    state = make_pair([0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [-1.0, 0.0])
    assert center_gap_rate(state, params) == pytest.approx(2.0 * 0.7 * 2.0)
