"""Closed-form solutions and analytic bounds used as ground truth."""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from loguru import logger
from scipy import optimize

from .errors import DomainError, InfeasibleError, PreconditionError
from .model import ModelParams, SystemState, WeightKind, WeightSpec, weight_integral

MAX_BRACKET_DOUBLINGS = 200


def _vector(values, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.array(values, dtype=float))
    if arr.ndim != 1 or not np.isfinite(arr).all():
        raise DomainError(f"{name} must be a finite vector")
    return arr


@dataclass(frozen=True, eq=False)
class TwoParticleIC:
    """One agent per group; only the inter coupling acts."""

    x0: np.ndarray
    y0: np.ndarray
    v0: np.ndarray
    w0: np.ndarray
    kappa_d: float
    psi_d_amplitude: float = 1.0

    def __post_init__(self):
        for name in ("x0", "y0", "v0", "w0"):
            object.__setattr__(self, name, _vector(getattr(self, name), name))
        if len({self.x0.shape, self.y0.shape, self.v0.shape, self.w0.shape}) != 1:
            raise DomainError("two-particle vectors must share a dimension")
        if not self.kappa_d > 0:
            raise DomainError(f"kappa_d must be positive, got {self.kappa_d}")


@dataclass(frozen=True, eq=False)
class ThreeParticleIC:
    """Two agents in group 1, one in group 2, constant weights.

    ``u1_0`` is v1 - v2 and ``u2_0`` is v2 - w1 at t = 0.
    """

    u1_0: np.ndarray
    u2_0: np.ndarray
    kappa_s: float
    kappa_d: float
    psi_s_amplitude: float = 1.0
    psi_d_amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "u1_0", _vector(self.u1_0, "u1_0"))
        object.__setattr__(self, "u2_0", _vector(self.u2_0, "u2_0"))
        if self.u1_0.shape != self.u2_0.shape:
            raise DomainError("u1_0 and u2_0 must share a dimension")
        if not (self.kappa_s > 0 and self.kappa_d > 0):
            raise DomainError("three-particle couplings must both be positive")

    @property
    def decay_rate(self) -> float:
        """Exponential decay rate of u1; negative means growth."""
        return self.kappa_s * self.psi_s_amplitude - self.kappa_d * self.psi_d_amplitude


def _check_time(t: float) -> None:
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")


def two_particle_exact(ic: TwoParticleIC, t: float) -> SystemState:
    """Exact state of the two-particle system at time ``t``.

    u = v - w grows at rate 2*kappa_d*A while v + w is conserved.
    """
    _check_time(t)
    rate = 2.0 * ic.kappa_d * ic.psi_d_amplitude
    u0 = ic.v0 - ic.w0
    total = ic.v0 + ic.w0
    u = u0 * math.exp(rate * t)
    gap = (ic.x0 - ic.y0) + u0 * (math.expm1(rate * t) / rate)
    centre = (ic.x0 + ic.y0) + t * total
    return SystemState(
        x=((centre + gap) / 2.0)[None, :],
        v=((total + u) / 2.0)[None, :],
        y=((centre - gap) / 2.0)[None, :],
        w=((total - u) / 2.0)[None, :],
    )


def three_particle_exact(ic: ThreeParticleIC, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Exact (u1, u2) of the three-particle system by variation of constants."""
    _check_time(t)
    decay = math.exp(-ic.decay_rate * t)
    growth = math.exp(2.0 * ic.kappa_d * ic.psi_d_amplitude * t)
    u1 = ic.u1_0 * decay
    u2 = (ic.u2_0 + ic.u1_0 / 2.0) * growth - (ic.u1_0 / 2.0) * decay
    return u1, u2


def macro_exact_constant_inter(
    vc0, wc0, kappa_d: float, t: float, psi_d_amplitude: float = 1.0
) -> Tuple[np.ndarray, np.ndarray]:
    """Group averages under a constant inter weight and no friction.

    The sum vc + wc is conserved and the gap grows like exp(2*kappa_d*A*t).
    """
    _check_time(t)
    vc0, wc0 = _vector(vc0, "vc0"), _vector(wc0, "wc0")
    half_sum = (vc0 + wc0) / 2.0
    half_gap = (vc0 - wc0) / 2.0 * math.exp(2.0 * kappa_d * psi_d_amplitude * t)
    return half_sum + half_gap, half_sum - half_gap


def riccati_upper_bound(params: ModelParams, m2_0: float) -> float:
    """Uniform bound on M2 under Rayleigh friction."""
    if not params.delta > 0:
        raise PreconditionError("the Riccati bound needs delta > 0; use exp_growth_bound instead")
    return max(2.0 + 4.0 * params.kappa_d * params.psi_d.amplitude / params.delta, float(m2_0))


def riccati_comparison(params: ModelParams, m2_0: float, t: float) -> float:
    """Logistic solution of y' = a*y - delta*y^2 with a = 4*kd*psi_d_sup + 2*delta.

    It majorizes M2 at every finite time and tends to the uniform bound.
    """
    if not params.delta > 0:
        raise PreconditionError("the Riccati comparison needs delta > 0")
    _check_time(t)
    if m2_0 == 0:
        return 0.0
    a = 4.0 * params.kappa_d * params.psi_d.amplitude + 2.0 * params.delta
    return a * m2_0 / (params.delta * m2_0 + (a - params.delta * m2_0) * math.exp(-a * t))


def exp_growth_bound(m2_0: float, kappa_d: float, psi_d_sup: float, t: float) -> float:
    """Frictionless exponential bound M2(0) * exp(4*kd*psi_d_sup*t)."""
    _check_time(t)
    return float(m2_0) * math.exp(4.0 * kappa_d * psi_d_sup * t)


def _closed_form_radius(psi_s: WeightSpec, dx0: float, reach: float):
    """Radius with normalized integral ``reach``, or None without a closed form."""
    beta = psi_s.beta
    if psi_s.kind == WeightKind.CONSTANT or beta == 0.0:
        return dx0 + reach
    if psi_s.kind == WeightKind.EXPONENTIAL:
        return -math.log(math.exp(-beta * dx0) - beta * reach) / beta
    if beta == 1.0:
        return math.tan(math.atan(dx0) + reach)
    if beta == 0.5:
        return math.sinh(math.asinh(dx0) + reach)
    return None


def flocking_radius(psi_s: WeightSpec, kappa_s: float, dx0: float, dv0: float) -> float:
    """Smallest x >= dx0 with kappa_s * integral_{dx0}^{x} psi_s = dv0.

    Raises InfeasibleError when the tail integral cannot absorb ``dv0``.
    """
    if not kappa_s > 0:
        raise PreconditionError(f"flocking radius needs kappa_s > 0, got {kappa_s}")
    if dx0 < 0 or dv0 < 0:
        raise DomainError("diameters must be nonnegative")
    if dv0 == 0:
        return float(dx0)

    capacity = kappa_s * weight_integral(psi_s, dx0, math.inf)
    if capacity <= dv0:
        deficit = dv0 - capacity
        raise InfeasibleError(
            f"velocity diameter {dv0:.6g} exceeds the flocking capacity {capacity:.6g} (deficit {deficit:.6g})",
            deficit=deficit,
        )

    target = dv0 / kappa_s
    radius = _closed_form_radius(psi_s, dx0, target / psi_s.amplitude)
    if radius is not None:
        return float(radius)

    def residual(x: float) -> float:
        return weight_integral(psi_s, dx0, x) - target

    hi = dx0 + max(1.0, target / psi_s.amplitude)
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if residual(hi) >= 0:
            break
        hi = dx0 + 2.0 * (hi - dx0)
    else:
        raise InfeasibleError(f"could not bracket the flocking radius below {hi:.6g}", deficit=0.0)

    radius = optimize.brentq(residual, dx0, hi, xtol=1e-12, rtol=1e-12)
    logger.debug(f"Flocking radius {radius:.10g} bracketed in [{dx0}, {hi:.6g}]")
    return float(radius)


def lyapunov_value(psi_s: WeightSpec, kappa_s: float, dv_hat: float, dx_hat0: float, dx_hat: float) -> float:
    """D(V^) + kappa_s * |integral of psi_s between the initial and current D(X^)|."""
    lo, hi = sorted((dx_hat0, dx_hat))
    return dv_hat + kappa_s * weight_integral(psi_s, lo, hi)
