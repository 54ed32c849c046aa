"""Scalar observables, micro-macro decomposition and stage detection."""

from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import PreconditionError
from .model import ModelParams, SystemState, eval_weight, rhs

if TYPE_CHECKING:
    from .integrator import Trajectory

DEFAULT_THRESHOLDS = (0.1, 0.5, 1e-4)


@dataclass(frozen=True, eq=False)
class DiagnosticsFrame:
    """Observables of one sampled state."""

    m1_v: np.ndarray
    m1_w: np.ndarray
    m2_v: float
    m2_w: float
    m2: float
    m2_hat: float
    center_sep: float
    dx: float
    dv: float
    dy: float
    dw: float
    min_inter_dist: float
    max_inter_dist: float
    psi_s_lower: float
    psi_s_upper: float
    psi_d_lower: float
    psi_d_upper: float
    min_inter_speed: float
    max_inter_speed: float

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["m1_v"] = self.m1_v.tolist()
        data["m1_w"] = self.m1_w.tolist()
        return data


@dataclass(frozen=True, eq=False)
class MicroMacro:
    """Group averages and the mean-zero fluctuations around them."""

    xc: np.ndarray
    yc: np.ndarray
    vc: np.ndarray
    wc: np.ndarray
    x_hat: np.ndarray
    v_hat: np.ndarray
    y_hat: np.ndarray
    w_hat: np.ndarray


@dataclass(frozen=True)
class StageReport:
    """Onset times of the three bi-clustering stages (None if never reached)."""

    t_velocity_sep: Optional[float]
    t_spatial_sep: Optional[float]
    t_flock: Optional[float]
    eps_v: float
    eps_x: float
    eps_f: float

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class FlockingReport:
    """Finite-horizon proxies for bi-cluster flocking."""

    sup_dx: float
    sup_dy: float
    terminal_dv: float
    terminal_dw: float
    terminal_min_inter_speed: float
    min_min_inter_speed: float
    separation_rate: Optional[float]
    separation_intercept: Optional[float]

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class MomentRates:
    """Time derivatives of the total first and second moments."""

    dm1: np.ndarray
    dm2: float


def moments(state: SystemState, params: Optional[ModelParams] = None) -> Tuple[np.ndarray, np.ndarray, float, float, float]:
    """Group mean velocities and normalized second moments."""
    if params is not None:
        state.check_shape(params)
    m1_v = state.v.mean(axis=0)
    m1_w = state.w.mean(axis=0)
    m2_v = float(np.einsum("id,id->", state.v, state.v) / state.n1)
    m2_w = float(np.einsum("id,id->", state.w, state.w) / state.n2)
    return m1_v, m1_w, m2_v, m2_w, m2_v + m2_w


def micro_macro(state: SystemState, params: Optional[ModelParams] = None) -> MicroMacro:
    """Split every agent into its group average plus fluctuation."""
    if params is not None:
        state.check_shape(params)
    xc, vc = state.x.mean(axis=0), state.v.mean(axis=0)
    yc, wc = state.y.mean(axis=0), state.w.mean(axis=0)
    return MicroMacro(
        xc=xc,
        yc=yc,
        vc=vc,
        wc=wc,
        x_hat=state.x - xc,
        v_hat=state.v - vc,
        y_hat=state.y - yc,
        w_hat=state.w - wc,
    )


def fluctuation_energy(state: SystemState, params: Optional[ModelParams] = None) -> float:
    """M2 of the velocity fluctuations of both groups."""
    mm = micro_macro(state, params)
    return float(
        np.einsum("id,id->", mm.v_hat, mm.v_hat) / state.n1
        + np.einsum("id,id->", mm.w_hat, mm.w_hat) / state.n2
    )


def _diameter(points: np.ndarray) -> float:
    if points.shape[0] < 2:
        return 0.0
    return float(pdist(points).max())


def diameters(state: SystemState, params: Optional[ModelParams] = None) -> Tuple[float, float, float, float]:
    """Position and velocity diameters (dx, dv, dy, dw)."""
    if params is not None:
        state.check_shape(params)
    return _diameter(state.x), _diameter(state.v), _diameter(state.y), _diameter(state.w)


def _min_distinct_distance(points: np.ndarray) -> Optional[float]:
    if points.shape[0] < 2:
        return None
    return float(pdist(points).min())


def inter_group_extremes(state: SystemState, params: ModelParams) -> Tuple[float, float, float, float, float, float]:
    """Inter-group distance extremes and the extremal weights they induce.

    Weights are nonincreasing, so each extreme is one evaluation at the
    matching extreme distance. psi_s ranges over distinct intra-group pairs of
    both groups, psi_d over inter-group pairs.
    """
    state.check_shape(params)
    inter = cdist(state.x, state.y)
    min_inter, max_inter = float(inter.min()), float(inter.max())

    intra_max = max(_diameter(state.x), _diameter(state.y))
    intra_mins = [d for d in (_min_distinct_distance(state.x), _min_distinct_distance(state.y)) if d is not None]
    psi_s_upper = eval_weight(params.psi_s, min(intra_mins)) if intra_mins else params.psi_s.amplitude
    psi_s_lower = eval_weight(params.psi_s, intra_max)

    psi_d_upper = eval_weight(params.psi_d, min_inter)
    psi_d_lower = eval_weight(params.psi_d, max_inter)
    return min_inter, max_inter, psi_s_lower, psi_s_upper, psi_d_lower, psi_d_upper


def compute_frame(state: SystemState, params: ModelParams) -> DiagnosticsFrame:
    """All observables of one state."""
    m1_v, m1_w, m2_v, m2_w, m2 = moments(state, params)
    dx, dv, dy, dw = diameters(state)
    min_inter, max_inter, psi_s_lower, psi_s_upper, psi_d_lower, psi_d_upper = inter_group_extremes(state, params)
    speeds = cdist(state.v, state.w)
    return DiagnosticsFrame(
        m1_v=m1_v,
        m1_w=m1_w,
        m2_v=m2_v,
        m2_w=m2_w,
        m2=m2,
        m2_hat=fluctuation_energy(state),
        center_sep=float(np.linalg.norm(m1_v - m1_w)),
        dx=dx,
        dv=dv,
        dy=dy,
        dw=dw,
        min_inter_dist=min_inter,
        max_inter_dist=max_inter,
        psi_s_lower=psi_s_lower,
        psi_s_upper=psi_s_upper,
        psi_d_lower=psi_d_lower,
        psi_d_upper=psi_d_upper,
        min_inter_speed=float(speeds.min()),
        max_inter_speed=float(speeds.max()),
    )


def frame_series(trajectory: "Trajectory", field_name: str) -> np.ndarray:
    """One scalar frame field across the whole trajectory."""
    return np.array([getattr(frame, field_name) for frame in trajectory.frames], dtype=float)


def _persistent_crossing(times: np.ndarray, values: np.ndarray, threshold: float, above: bool) -> Optional[float]:
    """Start of the final run of samples on the good side of ``threshold``."""
    good = values >= threshold if above else values <= threshold
    if not good[-1]:
        return None
    bad = np.nonzero(~good)[0]
    if bad.size == 0:
        return float(times[0])
    k = int(bad[-1]) + 1
    t0, t1 = times[k - 1], times[k]
    f0, f1 = values[k - 1], values[k]
    if f1 == f0:
        return float(t1)
    frac = min(max((threshold - f0) / (f1 - f0), 0.0), 1.0)
    return float(t0 + frac * (t1 - t0))


def detect_stages(trajectory: "Trajectory", thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> StageReport:
    """Velocity separation, spatial separation and flocking onset times."""
    if len(trajectory.times) == 0:
        raise PreconditionError("stage detection needs a nonempty trajectory")
    eps_v, eps_x, eps_f = (float(eps) for eps in thresholds)
    times = np.asarray(trajectory.times, dtype=float)
    return StageReport(
        t_velocity_sep=_persistent_crossing(times, frame_series(trajectory, "min_inter_speed"), eps_v, above=True),
        t_spatial_sep=_persistent_crossing(times, frame_series(trajectory, "min_inter_dist"), eps_x, above=True),
        t_flock=_persistent_crossing(times, frame_series(trajectory, "m2_hat"), eps_f, above=False),
        eps_v=eps_v,
        eps_x=eps_x,
        eps_f=eps_f,
    )


def tail_linear_fit(times: np.ndarray, values: np.ndarray, fraction: float = 1.0 / 3.0) -> Optional[Tuple[float, float]]:
    """Least-squares line (slope, intercept) through the final ``fraction`` of the horizon."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    start = times[-1] - fraction * (times[-1] - times[0])
    mask = times >= start
    if mask.sum() < 2:
        return None
    slope, intercept = np.polyfit(times[mask], values[mask], 1)
    return float(slope), float(intercept)


def flocking_report(trajectory: "Trajectory", params: ModelParams) -> FlockingReport:
    """Boundedness, alignment and separation proxies over the recorded horizon."""
    if len(trajectory.frames) == 0:
        raise PreconditionError("flocking report needs a nonempty trajectory")
    last = trajectory.frames[-1]
    speeds = frame_series(trajectory, "min_inter_speed")
    fit = tail_linear_fit(np.asarray(trajectory.times), frame_series(trajectory, "min_inter_dist"))
    return FlockingReport(
        sup_dx=float(frame_series(trajectory, "dx").max()),
        sup_dy=float(frame_series(trajectory, "dy").max()),
        terminal_dv=last.dv,
        terminal_dw=last.dw,
        terminal_min_inter_speed=last.min_inter_speed,
        min_min_inter_speed=float(speeds.min()),
        separation_rate=fit[0] if fit else None,
        separation_intercept=fit[1] if fit else None,
    )


def moment_rates(state: SystemState, params: ModelParams) -> MomentRates:
    """Closed-form derivatives of M1 = M1(V) + M1(W) and M2.

    Evaluated from pair sums, independently of ``rhs``.
    """
    state.check_shape(params)
    v, w, n1, n2 = state.v, state.w, state.n1, state.n2
    sv = np.einsum("id,id->i", v, v)
    sw = np.einsum("jd,jd->j", w, w)

    dm1 = params.delta * ((v * (1.0 - sv)[:, None]).mean(axis=0) + (w * (1.0 - sw)[:, None]).mean(axis=0))

    psi_xx = eval_weight(params.psi_s, cdist(state.x, state.x))
    psi_yy = eval_weight(params.psi_s, cdist(state.y, state.y))
    psi_xy = eval_weight(params.psi_d, cdist(state.x, state.y))
    dm2 = (
        -params.kappa_s / n1**2 * float(np.sum(psi_xx * cdist(v, v, "sqeuclidean")))
        - params.kappa_s / n2**2 * float(np.sum(psi_yy * cdist(w, w, "sqeuclidean")))
        + 2.0 * params.kappa_d / (n1 * n2) * float(np.sum(psi_xy * cdist(v, w, "sqeuclidean")))
        + 2.0 * params.delta * (float(np.mean(sv * (1.0 - sv))) + float(np.mean(sw * (1.0 - sw))))
    )
    return MomentRates(dm1=dm1, dm2=dm2)


def fluctuation_energy_rate(state: SystemState, params: ModelParams) -> float:
    """Exact d/dt of the fluctuation energy, from the right-hand side."""
    deriv = rhs(state, params)
    mm = micro_macro(state)
    return float(
        2.0 * np.einsum("id,id->", mm.v_hat, deriv.v_dot) / state.n1
        + 2.0 * np.einsum("id,id->", mm.w_hat, deriv.w_dot) / state.n2
    )


def center_gap_rate(state: SystemState, params: ModelParams) -> float:
    """Exact d/dt of |vc - wc|, from the right-hand side."""
    deriv = rhs(state, params)
    u = state.v.mean(axis=0) - state.w.mean(axis=0)
    u_dot = deriv.v_dot.mean(axis=0) - deriv.w_dot.mean(axis=0)
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        return float(np.linalg.norm(u_dot))
    return float(u @ u_dot) / norm


def center_gap_rate_formula(state: SystemState, params: ModelParams) -> np.ndarray:
    """d/dt (vc - wc) in micro-macro form.

    Inter pairs split into the macro gap plus fluctuations; friction adds
    delta * (vc - wc) and a cubic residue.
    """
    state.check_shape(params)
    mm = micro_macro(state)
    u = mm.vc - mm.wc
    psi_xy = eval_weight(params.psi_d, cdist(state.x, state.y))
    pair_gap = u[None, None, :] + mm.v_hat[:, None, :] - mm.w_hat[None, :, :]
    repulsion = 2.0 * params.kappa_d / (state.n1 * state.n2) * np.einsum("ij,ijd->d", psi_xy, pair_gap)
    sv = np.einsum("id,id->i", state.v, state.v)
    sw = np.einsum("jd,jd->j", state.w, state.w)
    cubic = -(state.v * sv[:, None]).mean(axis=0) + (state.w * sw[:, None]).mean(axis=0)
    return repulsion + params.delta * (u + cubic)
