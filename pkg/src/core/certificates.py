"""Sampled verification of flocking theorems, lemma inequalities and Gronwall bounds.

Every check here is one-sided and works on sampled trajectories: continuous
sup/inf are replaced by sample extremes, with a relative tolerance plus a
roundoff floor proportional to the velocity scale of the sample.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid
from scipy.spatial.distance import cdist

from .diagnostics import center_gap_rate, diameters, fluctuation_energy_rate, frame_series, micro_macro, tail_linear_fit
from .errors import ConfigError, InfeasibleError, PreconditionError
from .integrator import Trajectory
from .model import ModelParams, SystemState, WeightKind, eval_weight, weight_integral
from .oracles import flocking_radius, lyapunov_value, riccati_comparison, riccati_upper_bound

DEFAULT_TOL = 1e-2
DEFAULT_MACRO_TOL = 1e-6
DEFAULT_EPS0 = 0.5
BOUND_TOL = 1e-6
# Absolute slack per unit of velocity scale, for roundoff in sampled states.
ROUNDOFF = 1e-10


class CertificateStatus(str, Enum):
    """Outcome of a certificate."""

    HOLDS = "Holds"
    VIOLATED = "Violated"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class CertificateResult:
    """Status, worst signed slack and fitted constants of one certificate."""

    name: str
    status: CertificateStatus
    margin: float
    witness_time: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status == CertificateStatus.VIOLATED:
            # zero slack on a strict inequality counts as a violation
            if not self.margin < 0:
                self.margin = float(np.nextafter(0.0, -1.0))
            if self.witness_time is None:
                self.witness_time = 0.0

    @property
    def holds(self) -> bool:
        return self.status == CertificateStatus.HOLDS

    @classmethod
    def not_applicable(cls, name: str, reason: str) -> "CertificateResult":
        return cls(name, CertificateStatus.NOT_APPLICABLE, 0.0, None, {"reason": reason})

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "margin": self.margin,
            "witness_time": self.witness_time,
            "details": dict(sorted(self.details.items())),
        }


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """A real function known on an increasing time grid, linear in between."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size == 0:
            raise PreconditionError("sampled function needs matching 1-D times and values")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise PreconditionError("sample times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, times: Sequence[float], fn: Callable[[np.ndarray], np.ndarray]) -> "SampledFunction":
        times = np.asarray(times, dtype=float)
        return cls(times, np.asarray(fn(times), dtype=float))

    def __call__(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))

    def covers(self, t: float) -> bool:
        return self.times[0] <= t <= self.times[-1]

    def max_abs_on(self, a: float, b: float) -> float:
        """Max of |f| over [a, b]: interior samples plus interpolated endpoints."""
        inside = self.values[(self.times >= a) & (self.times <= b)]
        candidates = [abs(self(a)), abs(self(b))]
        if inside.size:
            candidates.append(float(np.max(np.abs(inside))))
        return max(candidates)

    def l1(self) -> float:
        return float(trapezoid(np.abs(self.values), self.times))


# ---------------------------------------------------------------------------
# Gronwall-type bounds


def _gronwall_window(y: SampledFunction, f: SampledFunction, t: float) -> Tuple[float, float, float]:
    if y.times[0] != 0.0:
        raise PreconditionError("Gronwall bounds need samples starting at t = 0")
    if not (y.covers(t) and f.covers(t) and f.covers(0.0)):
        raise PreconditionError(f"t={t} lies outside the sampled range")
    recent = f.max_abs_on(t / 2.0, t)
    sup = f.max_abs_on(0.0, t)
    return float(y.values[0]), recent, sup


def gronwall_decay_bound(y: SampledFunction, alpha: float, f: SampledFunction, t: float) -> float:
    """Upper bound for y' <= -alpha*y + f at time t."""
    if not alpha > 0:
        raise PreconditionError(f"alpha must be positive, got {alpha}")
    y0, recent, sup = _gronwall_window(y, f, t)
    return recent / alpha + y0 * math.exp(-alpha * t) + sup / alpha * math.exp(-alpha * t / 2.0)


def gronwall_lower_bound(y: SampledFunction, alpha: float, f: SampledFunction, t: float) -> float:
    """Lower bound for y' >= alpha*y - f at time t.

    Splitting the Duhamel integral at t/2 gives
    recent/alpha + (y0 - sup/alpha) e^{alpha t} + (sup - recent)/alpha e^{alpha t/2}.
    """
    if not alpha > 0:
        raise PreconditionError(f"alpha must be positive, got {alpha}")
    y0, recent, sup = _gronwall_window(y, f, t)
    grow = math.exp(alpha * t)
    return recent / alpha + (y0 - sup / alpha) * grow + (sup - recent) / alpha * math.exp(alpha * t / 2.0)


def _integrable_inputs(y: SampledFunction, alpha: SampledFunction, f: SampledFunction) -> Tuple[float, float, float]:
    if np.any(alpha.values < 0) or np.any(f.values < 0):
        raise PreconditionError("integrable Gronwall bounds need nonnegative alpha and f samples")
    return float(y.values[0]), alpha.l1(), f.l1()


def gronwall_integrable_upper(y: SampledFunction, alpha: SampledFunction, f: SampledFunction) -> float:
    """(y0 + |f|_1) exp(|alpha|_1) for y' <= alpha(t) y + f(t)."""
    y0, a1, f1 = _integrable_inputs(y, alpha, f)
    return (y0 + f1) * math.exp(a1)


def gronwall_integrable_lower(y: SampledFunction, alpha: SampledFunction, f: SampledFunction) -> float:
    """y0 - |f|_1 exp(|alpha|_1) for y' >= alpha(t) y - f(t)."""
    y0, a1, f1 = _integrable_inputs(y, alpha, f)
    return y0 - f1 * math.exp(a1)


def _result_from_slacks(name: str, times: np.ndarray, slacks: Dict[str, np.ndarray], details: Dict[str, Any]) -> CertificateResult:
    """Fold labelled slack series into one result; the worst slack decides."""
    margin, witness = math.inf, None
    for label, slack in slacks.items():
        slack = np.asarray(slack, dtype=float)
        k = int(np.argmin(slack))
        details[f"margin_{label}"] = float(slack[k])
        if slack[k] < margin:
            margin, witness = float(slack[k]), float(times[k])
    status = CertificateStatus.HOLDS if margin >= 0 else CertificateStatus.VIOLATED
    return CertificateResult(name, status, margin, witness, details)


def check_gronwall_decay(y: SampledFunction, alpha: float, f: SampledFunction, tol: float = BOUND_TOL) -> CertificateResult:
    """y(t) <= gronwall_decay_bound at every sample."""
    bounds = np.array([gronwall_decay_bound(y, alpha, f, t) for t in y.times])
    slack = bounds * (1.0 + tol) + tol - y.values
    return _result_from_slacks("gronwall_decay", y.times, {"decay": slack}, {"alpha": alpha})


def check_gronwall_lower(y: SampledFunction, alpha: float, f: SampledFunction, tol: float = BOUND_TOL) -> CertificateResult:
    """y(t) >= gronwall_lower_bound at every sample."""
    bounds = np.array([gronwall_lower_bound(y, alpha, f, t) for t in y.times])
    slack = y.values - bounds + tol * (1.0 + np.abs(bounds))
    return _result_from_slacks("gronwall_lower", y.times, {"growth": slack}, {"alpha": alpha})


def check_gronwall_integrable_upper(
    y: SampledFunction, alpha: SampledFunction, f: SampledFunction, tol: float = BOUND_TOL
) -> CertificateResult:
    """sup y <= gronwall_integrable_upper."""
    bound = gronwall_integrable_upper(y, alpha, f)
    slack = bound * (1.0 + tol) + tol - y.values
    return _result_from_slacks("gronwall_integrable_upper", y.times, {"upper": slack}, {"bound": bound})


def check_gronwall_integrable_lower(
    y: SampledFunction, alpha: SampledFunction, f: SampledFunction, tol: float = BOUND_TOL
) -> CertificateResult:
    """inf y >= gronwall_integrable_lower."""
    bound = gronwall_integrable_lower(y, alpha, f)
    slack = y.values - bound + tol * (1.0 + abs(bound))
    return _result_from_slacks("gronwall_integrable_lower", y.times, {"lower": slack}, {"bound": bound})


# ---------------------------------------------------------------------------
# Theorem monitors


def _velocity_floor(trajectory: Trajectory) -> np.ndarray:
    return ROUNDOFF * (1.0 + np.sqrt(frame_series(trajectory, "m2")))


def _constant_inter_regime(params: ModelParams) -> Optional[str]:
    if params.psi_d.kind != WeightKind.CONSTANT:
        return "needs a constant inter weight"
    if params.delta != 0:
        return "needs delta = 0"
    return None


def check_theorem31_hypotheses(initial: SystemState, params: ModelParams) -> CertificateResult:
    """Sign conditions and both flocking-capacity conditions at t = 0."""
    name = "theorem31_hypotheses"
    reason = _constant_inter_regime(params)
    if reason:
        return CertificateResult.not_applicable(name, reason)

    dx0, dv0, dy0, dw0 = diameters(initial, params)
    mm = micro_macro(initial, params)
    gap0 = float(np.linalg.norm(mm.vc - mm.wc))
    margins = {
        "kappa_s": params.kappa_s,
        "kappa_d": params.kappa_d,
        "dx0": dx0,
        "dy0": dy0,
        "center_gap0": gap0,
    }
    details: Dict[str, Any] = {"dx0": dx0, "dv0": dv0, "dy0": dy0, "dw0": dw0, "x_M": None, "y_M": None}

    for label, spread, velocity_spread in (("x", dx0, dv0), ("y", dy0, dw0)):
        capacity = params.kappa_s * weight_integral(params.psi_s, spread, math.inf) if params.kappa_s > 0 else 0.0
        details[f"capacity_{label}"] = capacity
        margins[f"capacity_{label}"] = capacity - velocity_spread
        if params.kappa_s > 0:
            try:
                details[f"{label}_M"] = flocking_radius(params.psi_s, params.kappa_s, spread, velocity_spread)
            except InfeasibleError as err:
                details[f"deficit_{label}"] = err.deficit

    margin_label = min(margins, key=lambda key: margins[key])
    margin = margins[margin_label]
    for label, value in margins.items():
        details[f"margin_{label}"] = value
    status = CertificateStatus.HOLDS if margin > 0 else CertificateStatus.VIOLATED
    if status == CertificateStatus.VIOLATED:
        details["violated"] = margin_label
    return CertificateResult(name, status, margin, 0.0, details)


def verify_theorem31_conclusions(
    trajectory: Trajectory,
    params: ModelParams,
    x_m: float,
    y_m: float,
    tol: float = DEFAULT_TOL,
    macro_tol: float = DEFAULT_MACRO_TOL,
) -> CertificateResult:
    """Diameter envelopes and the exact macro law along the trajectory."""
    name = "theorem31_conclusions"
    reason = _constant_inter_regime(params)
    if reason:
        return CertificateResult.not_applicable(name, reason)

    times = np.asarray(trajectory.times)
    floor = _velocity_floor(trajectory)
    first = trajectory.frames[0]
    rate_x = params.kappa_s * eval_weight(params.psi_s, x_m)
    rate_y = params.kappa_s * eval_weight(params.psi_s, y_m)
    expected_gap = first.center_sep * np.exp(2.0 * params.kappa_d * params.psi_d.amplitude * times)
    gap = frame_series(trajectory, "center_sep")

    slacks = {
        "dx": x_m + tol - frame_series(trajectory, "dx"),
        "dy": y_m + tol - frame_series(trajectory, "dy"),
        "dv": first.dv * np.exp(-rate_x * times) * (1.0 + tol) + floor - frame_series(trajectory, "dv"),
        "dw": first.dw * np.exp(-rate_y * times) * (1.0 + tol) + floor - frame_series(trajectory, "dw"),
        "macro": macro_tol * expected_gap + floor - np.abs(gap - expected_gap),
    }
    details = {"x_M": x_m, "y_M": y_m, "decay_rate_x": rate_x, "decay_rate_y": rate_y}
    return _result_from_slacks(name, times, slacks, details)


def verify_lyapunov(trajectory: Trajectory, params: ModelParams, tol: float = DEFAULT_TOL) -> CertificateResult:
    """Lyapunov stability estimate and sample-wise monotonicity for both groups."""
    name = "lyapunov"
    reason = _constant_inter_regime(params)
    if reason:
        return CertificateResult.not_applicable(name, reason)

    times = np.asarray(trajectory.times)
    floor = _velocity_floor(trajectory)
    slacks: Dict[str, np.ndarray] = {}
    for group, pos, vel in (("plus", "dx", "dv"), ("minus", "dy", "dw")):
        spreads = frame_series(trajectory, pos)
        velocity_spreads = frame_series(trajectory, vel)
        values = np.array(
            [lyapunov_value(params.psi_s, params.kappa_s, dv, spreads[0], dx) for dv, dx in zip(velocity_spreads, spreads)]
        )
        slacks[f"stability_{group}"] = velocity_spreads[0] * (1.0 + tol) + floor - values
        step = values[:-1] * (1.0 + tol) + floor[1:] - values[1:]
        slacks[f"monotone_{group}"] = np.concatenate([[math.inf], step])
    return _result_from_slacks(name, times, slacks, {})


def _prefix(fn: SampledFunction, k: int) -> SampledFunction:
    return SampledFunction(fn.times[: k + 1], fn.values[: k + 1])


def _prefix_integrable_lower(y: SampledFunction, alpha: SampledFunction, f: SampledFunction) -> np.ndarray:
    """gronwall_integrable_lower on [0, t_k] for every sample t_k."""
    return np.array([gronwall_integrable_lower(_prefix(y, k), _prefix(alpha, k), _prefix(f, k)) for k in range(len(y.times))])


def _tail_decay_margin(times: np.ndarray, g: np.ndarray) -> float:
    """log g at two thirds of the horizon minus log g at the end."""
    start = int(np.searchsorted(times, times[0] + 2.0 / 3.0 * (times[-1] - times[0])))
    start = min(start, len(times) - 1)
    with np.errstate(divide="ignore"):
        head, tail = np.log(g[start]), np.log(g[-1])
    if tail == -math.inf:
        return math.inf
    return float(head - tail)


def monitor_theorem41(
    trajectory: Trajectory,
    params: ModelParams,
    eps0: float = DEFAULT_EPS0,
    eps0_tilde: float = DEFAULT_EPS0,
    tol: float = DEFAULT_TOL,
) -> CertificateResult:
    """A priori conditions and proof envelopes of the frictionless flocking theorem."""
    name = "theorem41"
    if params.delta != 0:
        return CertificateResult.not_applicable(name, "needs delta = 0")

    times = np.asarray(trajectory.times)
    kd, psi_inf = params.kappa_d, params.psi_d.amplitude
    rate = kd * psi_inf
    psi_d_upper = frame_series(trajectory, "psi_d_upper")
    psi_d_lower = frame_series(trajectory, "psi_d_lower")
    gap = frame_series(trajectory, "center_sep")
    root_fluct = np.sqrt(frame_series(trajectory, "m2_hat"))
    floor = _velocity_floor(trajectory)
    first = trajectory.frames[0]

    coercivity = params.kappa_s * frame_series(trajectory, "psi_s_lower") - kd * psi_d_upper
    k_eta = int(np.argmin(coercivity))
    eta0 = 2.0 * float(coercivity[k_eta])

    g = psi_d_upper * np.exp((2.0 + eps0) * rate * times)
    c0 = float(np.max(g))
    c0_tilde = float(np.min(psi_d_lower * np.exp(eps0_tilde * rate * times)))
    decay_margin = _tail_decay_margin(times, g)

    details: Dict[str, Any] = {
        "eta0": eta0,
        "C0": c0,
        "C0_tilde": c0_tilde,
        "eps0": eps0,
        "eps0_tilde": eps0_tilde,
        "decay_margin": decay_margin,
    }
    slacks: Dict[str, np.ndarray] = {
        "coercivity": np.full_like(times, eta0 / 2.0),
        "decay": np.full_like(times, decay_margin),
    }
    witness_for = {"coercivity": float(times[k_eta]), "decay": float(times[-1])}

    if eta0 > 0:
        m2_0, m2_hat_0 = first.m2, first.m2_hat
        c1 = max(2.0 * c0 * math.sqrt(2.0 * m2_0) * kd / eta0, math.sqrt(m2_hat_0))
        c2 = (first.center_sep + 6.0 * c0 * c1 / ((2.0 + eps0) * psi_inf)) * math.exp(2.0 * c0 / ((2.0 + eps0) * psi_inf))
        c3 = max(2.0 * kd * c0 * c2 / eta0, math.sqrt(m2_hat_0))
        c4 = max(
            4.0 * c0 * c3 / ((2.0 + eps0) * psi_inf),
            6.0 * kd * c0 * c3 / (eta0 / 4.0 + (eps0 + 2.0) * rate),
        )
        alpha_l1 = 2.0 * c0_tilde / (eps0_tilde * psi_inf)
        c5 = first.center_sep - c4 * math.exp(alpha_l1)
        details.update({"C1": c1, "C2": c2, "C3": c3, "C4": c4, "C5": c5})

        envelope_b = 3.0 * c1 * np.maximum(np.exp(-eps0 * rate * times / 2.0), np.exp(-eta0 * times / 4.0))
        envelope_d = 3.0 * c3 * np.maximum(np.exp(-(2.0 + eps0) * rate * times / 2.0), np.exp(-eta0 * times / 4.0))
        slacks["fluctuation_envelope"] = envelope_b * (1.0 + tol) + floor - root_fluct
        slacks["center_gap_bound"] = c2 * (1.0 + tol) + floor - gap
        details["margin_refined_envelope"] = float(np.min(envelope_d * (1.0 + tol) + floor - root_fluct))
        details["margin_separation"] = float(np.min(gap) - c5)

        # d|vc - wc|/dt >= alpha |vc - wc| - f with sampled alpha and f
        gap_fn = SampledFunction(times, gap)
        alpha = SampledFunction(times, 2.0 * kd * psi_d_lower)
        forcing = SampledFunction(times, 2.0 * kd * psi_d_upper * root_fluct)
        lower = _prefix_integrable_lower(gap_fn, alpha, forcing)
        details["center_gap_lower_final"] = float(lower[-1])
        slacks["center_gap_lower"] = gap - lower + tol * (1.0 + np.abs(lower))

    result = _result_from_slacks(name, times, slacks, details)
    worst = min(slacks, key=lambda key: float(np.min(slacks[key])))
    if worst in witness_for:
        result.witness_time = witness_for[worst]
    if eta0 <= 0 and result.holds:
        result = CertificateResult(name, CertificateStatus.VIOLATED, eta0 / 2.0, float(times[k_eta]), result.details)
    return result


def monitor_theorem51(trajectory: Trajectory, params: ModelParams, tol: float = DEFAULT_TOL) -> CertificateResult:
    """Coercivity, fluctuation bounds and macro growth under Rayleigh friction."""
    name = "theorem51"
    if not params.delta > 0:
        return CertificateResult.not_applicable(name, "needs delta > 0")

    times = np.asarray(trajectory.times)
    kd, psi_inf, delta = params.kappa_d, params.psi_d.amplitude, params.delta
    first = trajectory.frames[0]
    psi_d_upper = frame_series(trajectory, "psi_d_upper")
    root_fluct = np.sqrt(frame_series(trajectory, "m2_hat"))
    floor = _velocity_floor(trajectory)

    coercivity = params.kappa_s * frame_series(trajectory, "psi_s_lower") - kd * psi_d_upper - delta
    k_eta = int(np.argmin(coercivity))
    eta1 = float(coercivity[k_eta])

    m2_inf = riccati_upper_bound(params, first.m2)
    n_max = max(params.n1, params.n2)
    details: Dict[str, Any] = {"eta1": eta1, "M2_inf": m2_inf}
    slacks: Dict[str, np.ndarray] = {"coercivity": np.full_like(times, eta1)}

    fit = tail_linear_fit(times, frame_series(trajectory, "min_inter_dist"))
    details["C8"], details["gamma0"] = (fit if fit else (None, None))

    if eta1 > 0:
        c6 = max(math.sqrt(first.m2_hat), 2.0 * kd * psi_inf * math.sqrt(m2_inf) / eta1)
        c7 = 2.0 * kd * psi_inf * c6 + delta * math.sqrt(n_max) * m2_inf**1.5
        details.update({"C6": c6, "C7": c7, "C7_over_delta": c7 / delta, "margin_threshold": first.center_sep - c7 / delta})
        slacks["fluctuation_bound"] = c6 * (1.0 + tol) + floor - root_fluct

        y = SampledFunction(times, root_fluct)
        f = SampledFunction(times, 2.0 * kd * math.sqrt(m2_inf) * psi_d_upper)
        decay = np.array([gronwall_decay_bound(y, eta1, f, t) for t in times])
        slacks["decay_envelope"] = decay * (1.0 + tol) + floor - root_fluct

    growth = []
    for state, frame in zip(trajectory.states, trajectory.frames):
        mean_psi = float(np.mean(eval_weight(params.psi_d, _inter_distances(state))))
        lower = (
            (2.0 * kd * mean_psi + delta) * frame.center_sep
            - 2.0 * kd * frame.psi_d_upper * math.sqrt(frame.m2_hat)
            - delta * math.sqrt(n_max) * frame.m2**1.5
        )
        growth.append(center_gap_rate(state, params) - lower)
    slacks["macro_growth"] = np.asarray(growth) + _rate_floor(trajectory, params)

    result = _result_from_slacks(name, times, slacks, details)
    if eta1 <= 0 and result.holds:
        result = CertificateResult(name, CertificateStatus.VIOLATED, eta1, float(times[k_eta]), result.details)
    return result


def _inter_distances(state: SystemState) -> np.ndarray:
    return cdist(state.x, state.y)


def _rate_floor(trajectory: Trajectory, params: ModelParams) -> np.ndarray:
    m2 = frame_series(trajectory, "m2")
    scale = 1.0 + params.kappa_s * params.psi_s.amplitude + params.kappa_d * params.psi_d.amplitude
    scale += params.delta * (1.0 + m2)
    return 1e3 * ROUNDOFF * scale * (1.0 + m2)


def check_growth_bound(trajectory: Trajectory, params: ModelParams) -> CertificateResult:
    """Frictionless exponential bound on M2."""
    name = "growth_bound"
    if params.delta != 0:
        return CertificateResult.not_applicable(name, "needs delta = 0")
    times = np.asarray(trajectory.times)
    m2 = frame_series(trajectory, "m2")
    bound = m2[0] * np.exp(4.0 * params.kappa_d * params.psi_d.amplitude * times)
    return _result_from_slacks(name, times, {"growth": bound * (1.0 + BOUND_TOL) - m2}, {"m2_0": float(m2[0])})


def check_riccati_bound(trajectory: Trajectory, params: ModelParams) -> CertificateResult:
    """Uniform Riccati bound on M2 under friction; records non-monotonicity."""
    name = "riccati_bound"
    if not params.delta > 0:
        return CertificateResult.not_applicable(name, "needs delta > 0")
    times = np.asarray(trajectory.times)
    m2 = frame_series(trajectory, "m2")
    bound = riccati_upper_bound(params, m2[0])
    logistic = np.array([riccati_comparison(params, m2[0], t) for t in times])
    steps = np.sign(np.diff(m2))
    steps = steps[steps != 0]
    details = {
        "bound": bound,
        "max_m2": float(m2.max()),
        "interior_extremum": bool(np.any(steps[1:] != steps[:-1])),
        "margin_logistic": float(np.min(logistic * (1.0 + BOUND_TOL) + BOUND_TOL - m2)),
    }
    return _result_from_slacks(name, times, {"riccati": bound + BOUND_TOL - m2}, details)


def check_lemma_inequalities(trajectory: Trajectory, params: ModelParams) -> CertificateResult:
    """Pointwise fluctuation and center-gap differential inequalities.

    Exact derivatives come from the right-hand side at each sampled state.
    """
    name = "lemma_inequalities"
    times = np.asarray(trajectory.times)
    kd, ks, delta = params.kappa_d, params.kappa_s, params.delta
    n_max = max(params.n1, params.n2)
    floor = _rate_floor(trajectory, params)

    fluct, upper, lower = [], [], []
    for state, frame in zip(trajectory.states, trajectory.frames):
        root = math.sqrt(frame.m2_hat)
        bound = 2.0 * (kd * frame.psi_d_upper - ks * frame.psi_s_lower + delta) * frame.m2_hat
        bound += 2.0 * kd * frame.psi_d_upper * frame.center_sep * root
        fluct.append(bound - fluctuation_energy_rate(state, params))

        gap_rate = center_gap_rate(state, params)
        if delta == 0:
            upper.append(2.0 * kd * frame.psi_d_upper * (frame.center_sep + root) - gap_rate)
            low = 2.0 * kd * frame.psi_d_lower * frame.center_sep - 2.0 * kd * frame.psi_d_upper * root
        else:
            mean_psi = float(np.mean(eval_weight(params.psi_d, _inter_distances(state))))
            low = (2.0 * kd * mean_psi + delta) * frame.center_sep - 2.0 * kd * frame.psi_d_upper * root
            low -= delta * math.sqrt(n_max) * frame.m2**1.5
        lower.append(gap_rate - low)

    slacks = {"fluctuation_rate": np.asarray(fluct) + floor, "gap_rate_lower": np.asarray(lower) + floor}
    if upper:
        slacks["gap_rate_upper"] = np.asarray(upper) + floor
    return _result_from_slacks(name, times, slacks, {})


# ---------------------------------------------------------------------------
# Registry


CertificateFn = Callable[..., CertificateResult]


class CertificateRegistry:
    """Named certificates evaluated on a finished trajectory."""

    def __init__(self):
        self._certificates: Dict[str, CertificateFn] = {}

    def register(self, name: str, fn: CertificateFn):
        self._certificates[name] = fn
        logger.debug(f"Registered certificate: {name}")

    def names(self) -> List[str]:
        return sorted(self._certificates)

    def get(self, name: str) -> CertificateFn:
        if name not in self._certificates:
            raise ConfigError(f"unknown certificate '{name}'; known: {', '.join(self.names())}")
        return self._certificates[name]

    def evaluate(self, name: str, trajectory: Trajectory, params: ModelParams, **options) -> CertificateResult:
        result = self.get(name)(trajectory, params, **options)
        logger.info(f"Certificate {name}: {result.status.value} (margin {result.margin:.6g})")
        return result


certificate_registry = CertificateRegistry()


def register_certificate(name: str):
    """Decorator registering a certificate under ``name``."""
    def decorator(fn: CertificateFn):
        certificate_registry.register(name, fn)
        return fn
    return decorator


@register_certificate("theorem31_hypotheses")
def _theorem31_hypotheses(trajectory: Trajectory, params: ModelParams, **_) -> CertificateResult:
    return check_theorem31_hypotheses(trajectory.states[0], params)


@register_certificate("theorem31_conclusions")
def _theorem31_conclusions(
    trajectory: Trajectory,
    params: ModelParams,
    tol: float = DEFAULT_TOL,
    macro_tol: float = DEFAULT_MACRO_TOL,
    x_m: Optional[float] = None,
    y_m: Optional[float] = None,
    **_,
) -> CertificateResult:
    hypotheses = check_theorem31_hypotheses(trajectory.states[0], params)
    if hypotheses.status == CertificateStatus.NOT_APPLICABLE:
        return CertificateResult.not_applicable("theorem31_conclusions", hypotheses.details["reason"])
    x_m = hypotheses.details.get("x_M") if x_m is None else x_m
    y_m = hypotheses.details.get("y_M") if y_m is None else y_m
    if hypotheses.status != CertificateStatus.HOLDS or x_m is None or y_m is None:
        return CertificateResult.not_applicable("theorem31_conclusions", "hypotheses do not hold")
    return verify_theorem31_conclusions(trajectory, params, x_m, y_m, tol=tol, macro_tol=macro_tol)


@register_certificate("lyapunov")
def _lyapunov(trajectory: Trajectory, params: ModelParams, tol: float = DEFAULT_TOL, **_) -> CertificateResult:
    return verify_lyapunov(trajectory, params, tol=tol)


@register_certificate("theorem41")
def _theorem41(
    trajectory: Trajectory,
    params: ModelParams,
    eps0: float = DEFAULT_EPS0,
    eps0_tilde: float = DEFAULT_EPS0,
    tol: float = DEFAULT_TOL,
    **_,
) -> CertificateResult:
    return monitor_theorem41(trajectory, params, eps0=eps0, eps0_tilde=eps0_tilde, tol=tol)


@register_certificate("theorem51")
def _theorem51(trajectory: Trajectory, params: ModelParams, tol: float = DEFAULT_TOL, **_) -> CertificateResult:
    return monitor_theorem51(trajectory, params, tol=tol)


@register_certificate("growth_bound")
def _growth_bound(trajectory: Trajectory, params: ModelParams, **_) -> CertificateResult:
    return check_growth_bound(trajectory, params)


@register_certificate("riccati_bound")
def _riccati_bound(trajectory: Trajectory, params: ModelParams, **_) -> CertificateResult:
    return check_riccati_bound(trajectory, params)


@register_certificate("lemma_inequalities")
def _lemma_inequalities(trajectory: Trajectory, params: ModelParams, **_) -> CertificateResult:
    return check_lemma_inequalities(trajectory, params)
