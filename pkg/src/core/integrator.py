"""Fixed-step fourth-order Runge-Kutta integration and trajectory recording."""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Sequence

import numpy as np
from loguru import logger

from .diagnostics import DiagnosticsFrame, compute_frame
from .errors import ConfigError, DivergenceError, DomainError, PreconditionError, ShapeMismatchError
from .model import ModelParams, SystemState, rhs, validate_params

# A final partial step shorter than this is dropped.
MIN_STEP = 1e-12


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Everything one integration run needs."""

    params: ModelParams
    initial: SystemState
    dt: float = 1e-3
    t_end: float = 10.0
    sample_stride: int = 10

    def __post_init__(self):
        violations = validate_params(self.params)
        if violations:
            raise ConfigError(f"invalid model parameters: {', '.join(violations)}")
        self.initial.check_shape(self.params)
        if not self.initial.is_finite():
            raise DomainError("initial state has non-finite coordinates")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= self.dt:
            raise DomainError(f"t_end ({self.t_end}) must be at least dt ({self.dt})")
        if int(self.sample_stride) < 1:
            raise DomainError(f"sample_stride must be at least 1, got {self.sample_stride}")


@dataclass(eq=False)
class Trajectory:
    """Sampled times with their states and diagnostics frames."""

    times: List[float] = field(default_factory=list)
    states: List[SystemState] = field(default_factory=list)
    frames: List[DiagnosticsFrame] = field(default_factory=list)

    def record(self, t: float, state: SystemState, params: ModelParams) -> None:
        self.times.append(float(t))
        self.states.append(state)
        self.frames.append(compute_frame(state, params))

    @property
    def final_state(self) -> SystemState:
        return self.states[-1]

    @property
    def final_frame(self) -> DiagnosticsFrame:
        return self.frames[-1]

    def __len__(self) -> int:
        return len(self.times)


def rk4_step(state: SystemState, params: ModelParams, dt: float, t: float = 0.0) -> SystemState:
    """One classical RK4 step of size ``dt``; ``t`` only labels divergence errors."""
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    n1, n2, dim = params.n1, params.n2, params.dim

    def f(flat: np.ndarray) -> np.ndarray:
        k = rhs(SystemState.from_flat(flat, n1, n2, dim), params).to_flat()
        if not np.isfinite(k).all():
            raise DivergenceError(f"non-finite derivative during step at t={t + dt:.6g}", time=t + dt)
        return k

    y0 = state.to_flat()
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = f(y0)
        k2 = f(y0 + 0.5 * dt * k1)
        k3 = f(y0 + 0.5 * dt * k2)
        k4 = f(y0 + dt * k3)
        y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    if not np.isfinite(y1).all():
        raise DivergenceError(f"non-finite state at t={t + dt:.6g}", time=t + dt)
    return SystemState.from_flat(y1, n1, n2, dim)


def _step_count(dt: float, t_end: float):
    n_full = int(math.floor(t_end / dt))
    if (n_full + 1) * dt <= t_end:
        n_full += 1
    remainder = t_end - n_full * dt
    return n_full, remainder


def simulate(config: SimConfig) -> Trajectory:
    """Integrate from t = 0 to t_end, sampling every ``sample_stride`` steps.

    Samples are always taken at t = 0 and at the final time. On divergence the
    raised DivergenceError carries the samples recorded so far.
    """
    params, dt, stride = config.params, config.dt, int(config.sample_stride)
    n_full, remainder = _step_count(dt, config.t_end)
    has_tail = remainder > MIN_STEP

    logger.debug(
        f"Integrating n1={params.n1} n2={params.n2} dim={params.dim} "
        f"dt={dt} t_end={config.t_end} ({n_full} steps{' + tail' if has_tail else ''})"
    )

    trajectory = Trajectory()
    state = config.initial
    trajectory.record(0.0, state, params)

    try:
        for k in range(1, n_full + 1):
            state = rk4_step(state, params, dt, t=(k - 1) * dt)
            if k % stride == 0 or (k == n_full and not has_tail):
                trajectory.record(k * dt, state, params)
        if has_tail:
            state = rk4_step(state, params, remainder, t=n_full * dt)
            trajectory.record(config.t_end, state, params)
    except DivergenceError as err:
        logger.warning(f"Integration diverged at t={err.time:.6g} after {len(trajectory)} samples")
        raise DivergenceError(str(err), time=err.time, trajectory=trajectory) from err

    logger.debug(f"Integration finished with {len(trajectory)} samples")
    return trajectory


def convergence_order(
    config: SimConfig,
    dts: Sequence[float],
    oracle: Callable[[float], SystemState],
) -> float:
    """Least-squares slope of log(error) against log(dt) at t_end.

    ``dts`` must hold at least three step sizes, each half the previous one.
    Returns ``math.inf`` when every error is exactly zero.
    """
    dts = [float(dt) for dt in dts]
    if len(dts) < 3:
        raise PreconditionError(f"convergence order needs at least 3 step sizes, got {len(dts)}")
    for coarse, fine in zip(dts, dts[1:]):
        if not math.isclose(fine, coarse / 2.0, rel_tol=1e-9):
            raise PreconditionError(f"step sizes must halve: {coarse} -> {fine}")

    exact = oracle(config.t_end)
    try:
        exact.check_shape(config.params)
    except ShapeMismatchError as err:
        raise ShapeMismatchError(f"oracle does not match the configuration: {err}") from err
    exact_flat = exact.to_flat()

    errors: List[float] = []
    for dt in dts:
        run_config = replace(config, dt=dt, sample_stride=max(1, int(round(config.t_end / dt))))
        final = simulate(run_config).final_state
        errors.append(float(np.max(np.abs(final.to_flat() - exact_flat))))
    logger.debug(f"Convergence errors: {errors}")

    positive = [(dt, err) for dt, err in zip(dts, errors) if err > 0.0]
    if len(positive) < 2:
        return math.inf
    log_dt = np.log([dt for dt, _ in positive])
    log_err = np.log([err for _, err in positive])
    slope, _ = np.polyfit(log_dt, log_err, 1)
    return float(slope)
