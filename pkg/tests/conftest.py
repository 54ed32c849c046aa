"""Shared fixtures for the biflock test suite."""

import numpy as np
import pytest

from src.core.integrator import SimConfig, simulate
from src.core.model import ModelParams, SystemState, WeightSpec
from src.experiments.initial import generate_initial
from src.experiments.run_config import InitSpec


@pytest.fixture
def mixed_params():
    """Small mixed configuration with friction and decaying weights."""
    return ModelParams(
        n1=6, n2=5, dim=2, kappa_s=3.0, kappa_d=1.5, delta=0.3,
        psi_s=WeightSpec.power_law(1.0, 0.4), psi_d=WeightSpec.exponential(0.8, 1.2),
    )


@pytest.fixture
def mixed_state(mixed_params):
    return generate_initial(InitSpec(), mixed_params, seed=7)


@pytest.fixture
def constant_inter_params():
    return ModelParams(
        n1=20, n2=20, dim=2, kappa_s=10.0, kappa_d=0.5,
        psi_s=WeightSpec.power_law(1.0, 0.4), psi_d=WeightSpec.constant(1.0),
    )


@pytest.fixture
def constant_inter_trajectory(constant_inter_params):
    initial = generate_initial(InitSpec(drift1=[0.5, 0.0], drift2=[-0.5, 0.0]), constant_inter_params, seed=3)
    return simulate(SimConfig(constant_inter_params, initial, dt=1e-3, t_end=2.0, sample_stride=10))


@pytest.fixture
def make_pair():
    """One agent per group from plain vectors."""

    def build(x0, v0, y0, w0) -> SystemState:
        return SystemState(x=np.atleast_2d(x0), v=np.atleast_2d(v0), y=np.atleast_2d(y0), w=np.atleast_2d(w0))

    return build
