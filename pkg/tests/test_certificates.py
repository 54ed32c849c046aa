import math
from dataclasses import replace

import numpy as np
import pytest

from src.core.certificates import (
    CertificateResult,
    CertificateStatus,
    SampledFunction,
    certificate_registry,
    check_gronwall_decay,
    check_gronwall_integrable_lower,
    check_gronwall_integrable_upper,
    check_gronwall_lower,
    check_growth_bound,
    check_lemma_inequalities,
    check_riccati_bound,
    check_theorem31_hypotheses,
    gronwall_decay_bound,
    gronwall_integrable_lower,
    gronwall_integrable_upper,
    gronwall_lower_bound,
    monitor_theorem41,
    monitor_theorem51,
    verify_lyapunov,
    verify_theorem31_conclusions,
)
from src.core.errors import ConfigError, PreconditionError
from src.core.integrator import SimConfig, Trajectory, simulate
from src.experiments.initial import generate_initial
from src.experiments.presets import preset

GRID = np.linspace(0.0, 3.0, 301)


def sampled(fn, times=GRID) -> SampledFunction:
    return SampledFunction.from_callable(times, fn)


def simulate_preset(name: str, **sim_overrides):
    config = preset(name)
    if sim_overrides:
        config = config.with_overrides({f"sim.{key}": value for key, value in sim_overrides.items()})
    initial = generate_initial(config.init, config.model, config.seed)
    sim = SimConfig(config.model, initial, dt=config.sim.dt, t_end=config.sim.t_end, sample_stride=config.sim.sample_stride)
    return config, simulate(sim)


# ---------------------------------------------------------------------------
# Results


def test_violated_result_always_has_negative_margin():
    result = CertificateResult("x", CertificateStatus.VIOLATED, 0.0)
    assert result.margin < 0
    assert result.witness_time == 0.0
    assert not result.holds

    skipped = CertificateResult.not_applicable("x", "needs delta > 0")
    assert skipped.as_dict()["status"] == "NotApplicable"
    assert skipped.details == {"reason": "needs delta > 0"}


def test_sampled_function_interpolates_and_integrates():
    f = SampledFunction([0.0, 1.0, 2.0], [0.0, 2.0, -2.0])
    assert f(0.5) == 1.0
    assert f.max_abs_on(0.25, 0.75) == 1.5
    assert f.max_abs_on(0.0, 2.0) == 2.0
    assert f.l1() == pytest.approx(3.0)
    with pytest.raises(PreconditionError):
        SampledFunction([0.0, 0.0], [1.0, 2.0])


# ---------------------------------------------------------------------------
# Gronwall bounds


def test_decay_bound_homogeneous_case_is_attained():
    y = sampled(lambda t: np.exp(-t))
    zero = sampled(np.zeros_like)
    assert gronwall_decay_bound(y, 1.0, zero, 2.0) == pytest.approx(math.exp(-2.0))
    assert check_gronwall_decay(y, 1.0, zero).holds


def test_decay_bound_with_decaying_forcing():
    y = sampled(lambda t: np.exp(-t) - np.exp(-2.0 * t))
    f = sampled(lambda t: np.exp(-2.0 * t))
    bound = gronwall_decay_bound(y, 1.0, f, 2.0)
    assert bound == pytest.approx(0.503215, abs=1e-6)
    assert y(2.0) == pytest.approx(0.117019, abs=1e-6)
    assert check_gronwall_decay(y, 1.0, f).holds


def test_decay_bound_rejects_growth():
    y = sampled(np.exp)
    result = check_gronwall_decay(y, 1.0, sampled(np.zeros_like))
    assert result.status == CertificateStatus.VIOLATED
    assert result.margin < 0
    assert result.witness_time == pytest.approx(3.0)


def test_gronwall_preconditions():
    y = sampled(np.exp)
    f = sampled(np.zeros_like)
    with pytest.raises(PreconditionError):
        gronwall_decay_bound(y, 0.0, f, 1.0)
    with pytest.raises(PreconditionError):
        gronwall_lower_bound(y, 1.0, f, 5.0)
    shifted = SampledFunction(GRID + 0.5, np.ones_like(GRID))
    with pytest.raises(PreconditionError):
        gronwall_decay_bound(shifted, 1.0, f, 1.0)
    with pytest.raises(PreconditionError):
        gronwall_integrable_upper(y, sampled(lambda t: -np.ones_like(t)), f)


def test_lower_bound_is_sharp_for_affine_growth():
    c = 0.7
    y = sampled(lambda t: c * (1.0 + np.exp(t)))
    f = sampled(lambda t: np.full_like(t, c))
    for t in (0.0, 1.0, 3.0):
        assert gronwall_lower_bound(y, 1.0, f, t) == pytest.approx(c * (1.0 + math.exp(t)))
    assert check_gronwall_lower(y, 1.0, f).holds

    zero = sampled(np.zeros_like)
    assert gronwall_lower_bound(sampled(np.exp), 1.0, zero, 2.0) == pytest.approx(math.exp(2.0))


def test_lower_bound_rejects_decay():
    result = check_gronwall_lower(sampled(lambda t: np.exp(-t)), 1.0, sampled(np.zeros_like))
    assert result.status == CertificateStatus.VIOLATED
    assert result.margin < 0


def test_integrable_upper_saturates():
    times = np.linspace(0.0, 1.0, 101)
    y = sampled(np.exp, times)
    ones, zeros = sampled(np.ones_like, times), sampled(np.zeros_like, times)
    assert gronwall_integrable_upper(y, ones, zeros) == pytest.approx(math.e)
    assert gronwall_integrable_upper(y, zeros, zeros) == 1.0
    assert check_gronwall_integrable_upper(y, ones, zeros).holds

    runaway = sampled(lambda t: np.exp(2.0 * t), times)
    assert check_gronwall_integrable_upper(runaway, ones, zeros).status == CertificateStatus.VIOLATED


def test_integrable_lower():
    times = np.linspace(0.0, 1.0, 101)
    zeros, ones = sampled(np.zeros_like, times), sampled(np.ones_like, times)
    y = sampled(lambda t: 1.0 - t, times)
    assert gronwall_integrable_lower(y, zeros, ones) == pytest.approx(0.0, abs=1e-12)
    assert check_gronwall_integrable_lower(y, zeros, ones).holds

    falling = sampled(lambda t: 1.0 - 2.0 * t, times)
    result = check_gronwall_integrable_lower(falling, zeros, ones)
    assert result.status == CertificateStatus.VIOLATED
    assert result.witness_time == pytest.approx(1.0)


def test_integrable_upper_reproduces_the_center_gap_constant():
    c0, c1, gap0, kappa_d, psi_inf, eps0 = 1.0, 2.0, 3.0, 1.0, 1.0, 0.5
    rate = (2.0 + eps0) * kappa_d * psi_inf
    times = np.linspace(0.0, 20.0, 200001)
    alpha = sampled(lambda t: 2.0 * kappa_d * c0 * np.exp(-rate * t), times)
    f = sampled(lambda t: 6.0 * kappa_d * c0 * c1 * np.exp(-rate * t), times)
    y = sampled(lambda t: np.full_like(t, gap0), times)
    expected = (gap0 + 4.8) * math.exp(0.8)
    assert gronwall_integrable_upper(y, alpha, f) == pytest.approx(expected, rel=1e-8)


# ---------------------------------------------------------------------------
# Constant inter weight


def test_theorem31_hypotheses_hold_on_preset():
    config = preset("theorem-3-1")
    initial = generate_initial(config.init, config.model, config.seed)
    result = check_theorem31_hypotheses(initial, config.model)
    assert result.holds
    assert result.margin > 0
    assert result.details["x_M"] >= result.details["dx0"]
    assert result.details["capacity_x"] == math.inf


def test_theorem31_hypotheses_capacity_deficit():
    config = preset("theorem-3-1-capacity-deficit")
    initial = generate_initial(config.init, config.model, config.seed)
    result = check_theorem31_hypotheses(initial, config.model)
    assert result.status == CertificateStatus.VIOLATED
    assert result.details["violated"].startswith("capacity_")
    assert result.details["deficit_x"] > 0


def test_theorem31_needs_constant_inter_weight_and_no_friction(mixed_state, mixed_params):
    assert check_theorem31_hypotheses(mixed_state, mixed_params).status == CertificateStatus.NOT_APPLICABLE


def test_theorem31_conclusions_on_short_run(constant_inter_trajectory, constant_inter_params):
    hypotheses = check_theorem31_hypotheses(constant_inter_trajectory.states[0], constant_inter_params)
    assert hypotheses.holds
    x_m = hypotheses.details["x_M"]

    result = verify_theorem31_conclusions(
        constant_inter_trajectory, constant_inter_params, x_m, hypotheses.details["y_M"]
    )
    assert result.details["margin_macro"] >= 0

    too_small = 0.1 * hypotheses.details["dx0"]
    bad = verify_theorem31_conclusions(constant_inter_trajectory, constant_inter_params, too_small, x_m)
    assert bad.status == CertificateStatus.VIOLATED
    assert bad.margin < 0
    assert bad.witness_time is not None


def test_registry_wrapper_accepts_radius_overrides(constant_inter_trajectory, constant_inter_params):
    result = certificate_registry.evaluate(
        "theorem31_conclusions", constant_inter_trajectory, constant_inter_params, x_m=1e-3, tol=1e-2
    )
    assert result.status == CertificateStatus.VIOLATED


def test_growth_and_lemma_inequalities_hold(constant_inter_trajectory, constant_inter_params):
    assert check_growth_bound(constant_inter_trajectory, constant_inter_params).holds
    assert check_lemma_inequalities(constant_inter_trajectory, constant_inter_params).holds


def test_growth_bound_rejects_a_weaker_coupling(constant_inter_trajectory, constant_inter_params):
    weaker = replace(constant_inter_params, kappa_d=0.0)
    result = check_growth_bound(constant_inter_trajectory, weaker)
    assert result.status == CertificateStatus.VIOLATED


def test_regime_gates(constant_inter_trajectory, constant_inter_params):
    with_friction = replace(constant_inter_params, delta=0.5)
    assert verify_lyapunov(constant_inter_trajectory, with_friction).status == CertificateStatus.NOT_APPLICABLE
    assert monitor_theorem41(constant_inter_trajectory, with_friction).status == CertificateStatus.NOT_APPLICABLE
    assert check_growth_bound(constant_inter_trajectory, with_friction).status == CertificateStatus.NOT_APPLICABLE
    assert monitor_theorem51(constant_inter_trajectory, constant_inter_params).status == CertificateStatus.NOT_APPLICABLE
    assert check_riccati_bound(constant_inter_trajectory, constant_inter_params).status == CertificateStatus.NOT_APPLICABLE


def test_registry_lookup():
    assert certificate_registry.names() == sorted(
        [
            "growth_bound",
            "lemma_inequalities",
            "lyapunov",
            "riccati_bound",
            "theorem31_conclusions",
            "theorem31_hypotheses",
            "theorem41",
            "theorem51",
        ]
    )
    with pytest.raises(ConfigError):
        certificate_registry.get("theorem99")


# ---------------------------------------------------------------------------
# Full presets


@pytest.mark.slow
def test_theorem31_preset_end_to_end():
    config, trajectory = simulate_preset("theorem-3-1")
    for name in ("theorem31_hypotheses", "theorem31_conclusions", "lyapunov", "growth_bound"):
        result = certificate_registry.evaluate(name, trajectory, config.model)
        assert result.holds, (name, result.details)


@pytest.mark.slow
def test_lyapunov_weak_intra_is_violated():
    config, trajectory = simulate_preset("lyapunov-weak-intra")
    result = verify_lyapunov(trajectory, config.model)
    assert result.status == CertificateStatus.VIOLATED
    assert result.margin < 0


@pytest.mark.slow
def test_theorem41_preset_holds():
    config, trajectory = simulate_preset("theorem-4-1")
    result = monitor_theorem41(trajectory, config.model)
    assert result.holds, result.details
    assert result.details["eta0"] > 0
    assert result.details["C5"] is not None
    assert result.details["margin_center_gap_lower"] >= 0
    assert result.details["center_gap_lower_final"] > 0


def test_theorem41_tracks_the_center_gap_lower_bound():
    config, trajectory = simulate_preset("theorem-4-1", t_end=0.3)
    result = monitor_theorem41(trajectory, config.model)
    assert result.details["margin_center_gap_lower"] >= 0
    assert result.details["center_gap_lower_final"] <= trajectory.frames[0].center_sep

    collapsed = Trajectory(
        times=list(trajectory.times),
        states=list(trajectory.states),
        frames=[trajectory.frames[0]] + [replace(f, center_sep=0.5 * f.center_sep) for f in trajectory.frames[1:]],
    )
    broken = monitor_theorem41(collapsed, config.model)
    assert broken.status == CertificateStatus.VIOLATED
    assert broken.details["margin_center_gap_lower"] < 0
    assert broken.witness_time > 0


@pytest.mark.slow
@pytest.mark.parametrize("name", ["theorem-4-1-constant-inter", "theorem-4-1-no-intra"])
def test_theorem41_negative_controls(name):
    config, trajectory = simulate_preset(name, t_end=2.0)
    result = monitor_theorem41(trajectory, config.model)
    assert result.status == CertificateStatus.VIOLATED
    assert result.margin < 0
    assert result.witness_time is not None


@pytest.mark.slow
def test_theorem51_preset_holds():
    config, trajectory = simulate_preset("theorem-5-1")
    result = monitor_theorem51(trajectory, config.model)
    assert result.holds, result.details
    assert result.details["eta1"] > 0
    assert result.details["C8"] > 0
    assert check_riccati_bound(trajectory, config.model).holds


@pytest.mark.slow
def test_theorem51_weak_intra_is_violated():
    config, trajectory = simulate_preset("theorem-5-1-weak-intra", t_end=1.0)
    result = monitor_theorem51(trajectory, config.model)
    assert result.status == CertificateStatus.VIOLATED
    assert result.details["eta1"] <= 0


@pytest.mark.slow
@pytest.mark.parametrize("name", ["example-6-2-delta-1", "example-6-2-delta-0.1"])
def test_riccati_bound_on_friction_examples(name):
    config, trajectory = simulate_preset(name)
    result = check_riccati_bound(trajectory, config.model)
    assert result.holds
    assert result.details["bound"] >= 2.0 + 40.0 / config.model.delta
    if config.model.delta == 1.0:
        assert result.details["bound"] == 42.0
        assert result.details["interior_extremum"]


@pytest.mark.slow
def test_growth_bound_on_frictionless_example():
    config, trajectory = simulate_preset("example-6-1")
    assert check_growth_bound(trajectory, config.model).holds
    m2 = np.array([frame.m2 for frame in trajectory.frames])
    times = np.array(trajectory.times)
    prefix = times <= 0.1 * times[-1]
    slope = np.polyfit(times[prefix], np.log(m2[prefix]), 1)[0]
    assert slope > 0
