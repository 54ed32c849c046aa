"""Seeded initial data for both ensembles."""

from typing import Optional

import numpy as np
from loguru import logger

from ..core.errors import ConfigError, ShapeMismatchError
from ..core.model import ModelParams, SystemState
from ..utils.rng import SplitMix64
from .run_config import Box, InitKind, InitSpec, VelocityCentering


def _box(box: Optional[Box], dim: int) -> Box:
    box = box or Box.unit(dim)
    if len(box.lower) != dim:
        raise ConfigError(f"box has dimension {len(box.lower)}, model has {dim}")
    return box


def _drift(drift, dim: int) -> np.ndarray:
    if drift is None:
        return np.zeros(dim)
    drift = np.asarray(drift, dtype=float)
    if drift.shape != (dim,):
        raise ConfigError(f"drift {drift.tolist()} does not match dimension {dim}")
    return drift


def _explicit(init: InitSpec, params: ModelParams) -> SystemState:
    explicit = init.explicit
    try:
        state = SystemState(x=explicit.x, v=explicit.v, y=explicit.y, w=explicit.w)
        state.check_shape(params)
    except (ShapeMismatchError, ValueError) as err:
        raise ConfigError(f"explicit initial state: {err}") from err
    return state


def generate_initial(init: InitSpec, params: ModelParams, seed: int) -> SystemState:
    """Positions uniform in each group's box, velocities uniform then centered.

    Draw order is x, v, y, w from one generator seeded with ``seed``.
    Explicit states are returned as given, with drifts added.
    """
    dim = params.dim
    drift1, drift2 = _drift(init.drift1, dim), _drift(init.drift2, dim)

    if init.kind == InitKind.EXPLICIT:
        state = _explicit(init, params)
        return state.with_arrays(v=state.v + drift1, w=state.w + drift2)

    box1, box2 = _box(init.box1, dim), _box(init.box2, dim)
    scale = init.velocity_scale
    rng = SplitMix64(seed)
    x = rng.uniform(box1.lower, box1.upper, (params.n1, dim))
    v = rng.uniform(-scale, scale, (params.n1, dim))
    y = rng.uniform(box2.lower, box2.upper, (params.n2, dim))
    w = rng.uniform(-scale, scale, (params.n2, dim))

    if init.velocity_centering == VelocityCentering.PER_GROUP:
        v = v - v.mean(axis=0)
        w = w - w.mean(axis=0)
    else:
        mean = (v.sum(axis=0) + w.sum(axis=0)) / (params.n1 + params.n2)
        v, w = v - mean, w - mean

    logger.debug(f"Generated initial data with seed {seed} ({init.velocity_centering.value} centering)")
    return SystemState(x=x, v=v + drift1, y=y, w=w + drift2)
