"""Two-ensemble Cucker-Smale model: weights, parameters, state and right-hand side."""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Union

import numpy as np
from scipy import integrate
from scipy.spatial.distance import cdist

from .errors import DomainError, ShapeMismatchError

ArrayLike = Union[float, np.ndarray]


class WeightKind(str, Enum):
    """Supported communication weight families."""

    CONSTANT = "constant"
    POWER_LAW = "power_law"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class WeightSpec:
    """Bounded nonincreasing communication weight.

    ``amplitude`` is the value at r = 0 and doubles as the sup norm of the
    weight. ``beta`` shapes the decay and is ignored for constant weights.
    """

    kind: WeightKind = WeightKind.CONSTANT
    amplitude: float = 1.0
    beta: float = 0.0

    @classmethod
    def constant(cls, amplitude: float = 1.0) -> "WeightSpec":
        return cls(WeightKind.CONSTANT, amplitude, 0.0)

    @classmethod
    def power_law(cls, amplitude: float = 1.0, beta: float = 0.4) -> "WeightSpec":
        return cls(WeightKind.POWER_LAW, amplitude, beta)

    @classmethod
    def exponential(cls, amplitude: float = 1.0, beta: float = 1.0) -> "WeightSpec":
        return cls(WeightKind.EXPONENTIAL, amplitude, beta)

    def __call__(self, r: ArrayLike) -> ArrayLike:
        return eval_weight(self, r)


@dataclass(frozen=True)
class ModelParams:
    """Group sizes, dimension, couplings, friction and the two weights."""

    n1: int
    n2: int
    dim: int
    kappa_s: float
    kappa_d: float
    delta: float = 0.0
    psi_s: WeightSpec = field(default_factory=WeightSpec)
    psi_d: WeightSpec = field(default_factory=WeightSpec)


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2:
        raise ShapeMismatchError(f"{name} must be a 2-D array (particles x dim), got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SystemState:
    """Positions and velocities of both ensembles at one instant.

    Arrays are copied on construction, stored as read-only float64 and shaped
    (particles, dim).
    """

    x: np.ndarray
    v: np.ndarray
    y: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        for name in ("x", "v", "y", "w"):
            object.__setattr__(self, name, _frozen(getattr(self, name), name))
        if self.x.shape != self.v.shape or self.y.shape != self.w.shape:
            raise ShapeMismatchError("positions and velocities of a group must share a shape")
        if self.x.shape[1] != self.y.shape[1]:
            raise ShapeMismatchError("both groups must live in the same dimension")

    @property
    def n1(self) -> int:
        return self.x.shape[0]

    @property
    def n2(self) -> int:
        return self.y.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def is_finite(self) -> bool:
        """True when every coordinate is finite."""
        return bool(
            np.isfinite(self.x).all()
            and np.isfinite(self.v).all()
            and np.isfinite(self.y).all()
            and np.isfinite(self.w).all()
        )

    def check_shape(self, params: ModelParams) -> None:
        """Raise when the state does not belong to ``params``."""
        expected = ((params.n1, params.dim), (params.n2, params.dim))
        if (self.x.shape, self.y.shape) != expected:
            raise ShapeMismatchError(
                f"state shapes {self.x.shape}/{self.y.shape} do not match "
                f"n1={params.n1}, n2={params.n2}, dim={params.dim}"
            )

    def to_flat(self) -> np.ndarray:
        """Concatenate x, v, y, w into one flat vector."""
        return np.concatenate([self.x.ravel(), self.v.ravel(), self.y.ravel(), self.w.ravel()])

    @classmethod
    def from_flat(cls, flat: np.ndarray, n1: int, n2: int, dim: int) -> "SystemState":
        """Inverse of ``to_flat``."""
        flat = np.asarray(flat, dtype=float)
        a, b = n1 * dim, n2 * dim
        if flat.shape != (2 * a + 2 * b,):
            raise ShapeMismatchError(f"flat state of length {flat.size} does not fit n1={n1}, n2={n2}, dim={dim}")
        return cls(
            x=flat[:a].reshape(n1, dim),
            v=flat[a:2 * a].reshape(n1, dim),
            y=flat[2 * a:2 * a + b].reshape(n2, dim),
            w=flat[2 * a + b:].reshape(n2, dim),
        )

    def with_arrays(self, **arrays: np.ndarray) -> "SystemState":
        """Copy with some of x, v, y, w replaced."""
        return replace(self, **arrays)

    def as_lists(self) -> dict:
        """Plain nested lists, for JSON round-trips."""
        return {"x": self.x.tolist(), "v": self.v.tolist(), "y": self.y.tolist(), "w": self.w.tolist()}


@dataclass(frozen=True, eq=False)
class StateDerivative:
    """Time derivative of a SystemState, same shapes."""

    x_dot: np.ndarray
    v_dot: np.ndarray
    y_dot: np.ndarray
    w_dot: np.ndarray

    def to_flat(self) -> np.ndarray:
        return np.concatenate([self.x_dot.ravel(), self.v_dot.ravel(), self.y_dot.ravel(), self.w_dot.ravel()])


def eval_weight(spec: WeightSpec, r: ArrayLike) -> ArrayLike:
    """Evaluate a communication weight at distance(s) ``r``.

    Accepts a scalar or an array of nonnegative distances; scalars come back as
    ``float``.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError(f"weight evaluated at negative distance {np.min(r_arr)}")

    if spec.kind == WeightKind.CONSTANT:
        out = np.full_like(r_arr, spec.amplitude)
    elif spec.kind == WeightKind.POWER_LAW:
        out = spec.amplitude / np.power(1.0 + r_arr * r_arr, spec.beta)
    elif spec.kind == WeightKind.EXPONENTIAL:
        out = spec.amplitude * np.exp(-spec.beta * r_arr)
    else:
        raise DomainError(f"unknown weight kind {spec.kind}")

    if out.ndim == 0:
        return float(out)
    return out


def weight_is_long_ranged(spec: WeightSpec) -> bool:
    """True when the tail integral of the weight diverges."""
    if spec.kind == WeightKind.CONSTANT:
        return True
    if spec.kind == WeightKind.POWER_LAW:
        return spec.beta <= 0.5
    return spec.beta == 0.0


def weight_integral(spec: WeightSpec, a: float, b: float) -> float:
    """Integral of the weight over [a, b]; ``b`` may be ``math.inf``."""
    if a < 0 or b < a:
        raise DomainError(f"invalid integration range [{a}, {b}]")
    if a == b:
        return 0.0
    amp, beta = spec.amplitude, spec.beta

    if math.isinf(b) and weight_is_long_ranged(spec):
        return math.inf

    if spec.kind == WeightKind.CONSTANT or beta == 0.0:
        return amp * (b - a)

    if spec.kind == WeightKind.EXPONENTIAL:
        tail_b = 0.0 if math.isinf(b) else math.exp(-beta * b)
        return amp * (math.exp(-beta * a) - tail_b) / beta

    # Power law closed forms
    if beta == 1.0:
        upper = math.pi / 2 if math.isinf(b) else math.atan(b)
        return amp * (upper - math.atan(a))
    if beta == 0.5:
        return amp * (math.asinh(b) - math.asinh(a))

    value, _ = integrate.quad(lambda r: eval_weight(spec, r), a, b, epsabs=1e-13, epsrel=1e-11, limit=200)
    return float(value)


def validate_params(params: ModelParams) -> List[str]:
    """Return the list of violated parameter invariants (empty means valid)."""
    violations: List[str] = []
    for name in ("n1", "n2", "dim"):
        value = getattr(params, name)
        if not isinstance(value, (int, np.integer)) or value < 1:
            violations.append(f"{name} ≥ 1")
    for name in ("kappa_s", "kappa_d", "delta"):
        value = getattr(params, name)
        if not math.isfinite(value):
            violations.append(f"{name} finite")
        elif value < 0:
            violations.append(f"{name} ≥ 0")
    for name in ("psi_s", "psi_d"):
        spec = getattr(params, name)
        if not isinstance(spec, WeightSpec):
            violations.append(f"{name} is a WeightSpec")
            continue
        if not (math.isfinite(spec.amplitude) and spec.amplitude > 0):
            violations.append(f"{name}.amplitude > 0")
        if not (math.isfinite(spec.beta) and spec.beta >= 0):
            violations.append(f"{name}.beta ≥ 0")
    return violations


def _alignment(weights: np.ndarray, own: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Row sums of weights[i, k] * (other[k] - own[i])."""
    return np.einsum("ik,ikd->id", weights, other[np.newaxis, :, :] - own[:, np.newaxis, :])


def _friction(delta: float, vel: np.ndarray) -> np.ndarray:
    if delta == 0.0:
        return np.zeros_like(vel)
    speed2 = np.einsum("id,id->i", vel, vel)
    return delta * vel * (1.0 - speed2)[:, np.newaxis]


def rhs(state: SystemState, params: ModelParams) -> StateDerivative:
    """Right-hand side of the mixed-ensemble system.

    Intra sums include k = i (zero contribution). Inter terms enter with a
    minus sign: group 1 feels -(kd/n2) sum_k psi_d(|y_k - x_i|)(w_k - v_i) and
    group 2 mirrors it with the sum over group 1.
    """
    state.check_shape(params)
    x, v, y, w = state.x, state.v, state.y, state.w

    psi_xx = eval_weight(params.psi_s, cdist(x, x))
    psi_yy = eval_weight(params.psi_s, cdist(y, y))
    psi_xy = eval_weight(params.psi_d, cdist(x, y))

    v_dot = (params.kappa_s / params.n1) * _alignment(psi_xx, v, v)
    v_dot -= (params.kappa_d / params.n2) * _alignment(psi_xy, v, w)
    v_dot += _friction(params.delta, v)

    w_dot = (params.kappa_s / params.n2) * _alignment(psi_yy, w, w)
    w_dot -= (params.kappa_d / params.n1) * _alignment(psi_xy.T, w, v)
    w_dot += _friction(params.delta, w)

    return StateDerivative(x_dot=v.copy(), v_dot=v_dot, y_dot=w.copy(), w_dot=w_dot)
