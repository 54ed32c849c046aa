"""Catalog of named experiment presets."""

from typing import Callable, Dict, List

from ..core.errors import ConfigError
from ..core.model import ModelParams, WeightSpec
from .run_config import Box, ExplicitState, InitKind, InitSpec, RunConfig, SimSettings

PINNED_SEED = 42

EXAMPLE_WEIGHT = WeightSpec.power_law(1.0, 0.4)
LEFT_BOX = Box(lower=[0.0, 0.0], upper=[1.0, 1.0])
RIGHT_BOX = Box(lower=[1.5, 0.0], upper=[2.5, 1.0])
CLUSTER_BOX = Box(lower=[0.0, 0.0], upper=[0.05, 0.05])


def _example(name: str, delta: float, t_end: float, certificates: List[str], init: InitSpec = InitSpec()) -> RunConfig:
    """50 + 50 agents, kappa_s = kappa_d = 10, mixed in the unit square by default."""
    return RunConfig(
        name=name,
        model=ModelParams(n1=50, n2=50, dim=2, kappa_s=10.0, kappa_d=10.0, delta=delta, psi_s=EXAMPLE_WEIGHT, psi_d=EXAMPLE_WEIGHT),
        sim=SimSettings(dt=1e-3, t_end=t_end, sample_stride=10),
        init=init,
        seed=PINNED_SEED,
        certificates=certificates,
    )


def _stage_example(name: str, delta: float, certificates: List[str]) -> RunConfig:
    """Both groups drawn in one small patch, slow and weakly counter-drifting.

    Only delta differs between the stage-timing presets. Group spatial spread
    sets the late velocity fan from the uneven inter weight, so it starts small.
    """
    cluster = InitSpec(box1=CLUSTER_BOX, box2=CLUSTER_BOX, velocity_scale=0.2, drift1=[0.1, 0.0], drift2=[-0.1, 0.0])
    return _example(name, delta, 5.0, certificates, init=cluster)


def _two_particle() -> RunConfig:
    return RunConfig(
        name="two-particle",
        model=ModelParams(n1=1, n2=1, dim=2, kappa_s=1.0, kappa_d=1.0, psi_d=WeightSpec.constant(1.0)),
        sim=SimSettings(dt=1e-3, t_end=1.0, sample_stride=10),
        init=InitSpec(
            kind=InitKind.EXPLICIT,
            explicit=ExplicitState(x=[[0.0, 0.0]], v=[[1.0, 0.5]], y=[[1.0, 0.0]], w=[[-0.5, 0.0]]),
        ),
        certificates=["growth_bound"],
    )


def _three_particle() -> RunConfig:
    """Two group-1 agents mirrored about one resting group-2 agent.

    With A_d = 1/2 the group-1 spread decays iff kappa_s > kappa_d / 2.
    """
    return RunConfig(
        name="three-particle",
        model=ModelParams(
            n1=2, n2=1, dim=1, kappa_s=2.0, kappa_d=2.0,
            psi_s=WeightSpec.constant(1.0), psi_d=WeightSpec.constant(0.5),
        ),
        sim=SimSettings(dt=1e-2, t_end=150.0, sample_stride=100),
        init=InitSpec(
            kind=InitKind.EXPLICIT,
            explicit=ExplicitState(x=[[-0.5], [0.5]], v=[[0.5], [-0.5]], y=[[0.0]], w=[[0.0]]),
        ),
        certificates=["growth_bound"],
    )


def _theorem31(name: str = "theorem-3-1", kappa_s: float = 20.0, kappa_d: float = 0.05, psi_s: WeightSpec = EXAMPLE_WEIGHT) -> RunConfig:
    """Constant inter weight, opposite drifts.

    kappa_d stays small next to kappa_s * psi_s: the inter term also pumps each
    group's fluctuations at rate kappa_d, which the diameter envelopes ignore.
    """
    return RunConfig(
        name=name,
        model=ModelParams(n1=20, n2=20, dim=2, kappa_s=kappa_s, kappa_d=kappa_d, psi_s=psi_s, psi_d=WeightSpec.constant(1.0)),
        sim=SimSettings(dt=1e-3, t_end=5.0, sample_stride=10),
        init=InitSpec(drift1=[0.5, 0.0], drift2=[-0.5, 0.0]),
        seed=PINNED_SEED,
        certificates=["growth_bound", "lemma_inequalities", "lyapunov", "theorem31_conclusions", "theorem31_hypotheses"],
    )


def _theorem41(name: str = "theorem-4-1", kappa_s: float = 10.0, psi_d: WeightSpec = WeightSpec.exponential(1.0, 5.0)) -> RunConfig:
    """Separated groups, fast-decaying inter weight, no friction."""
    return RunConfig(
        name=name,
        model=ModelParams(n1=20, n2=20, dim=2, kappa_s=kappa_s, kappa_d=0.5, psi_s=WeightSpec.constant(1.0), psi_d=psi_d),
        sim=SimSettings(dt=1e-3, t_end=6.0, sample_stride=10),
        init=InitSpec(box1=RIGHT_BOX, box2=LEFT_BOX, drift1=[1.0, 0.0], drift2=[-1.0, 0.0]),
        seed=PINNED_SEED,
        certificates=["lemma_inequalities", "theorem41"],
    )


def _theorem51(name: str = "theorem-5-1", kappa_s: float = 20.0) -> RunConfig:
    """Separated groups under Rayleigh friction."""
    return RunConfig(
        name=name,
        model=ModelParams(
            n1=20, n2=20, dim=2, kappa_s=kappa_s, kappa_d=0.5, delta=0.5,
            psi_s=EXAMPLE_WEIGHT, psi_d=WeightSpec.exponential(1.0, 2.0),
        ),
        sim=SimSettings(dt=2e-3, t_end=6.0, sample_stride=10),
        init=InitSpec(box1=RIGHT_BOX, box2=LEFT_BOX, drift1=[1.0, 0.0], drift2=[-1.0, 0.0]),
        seed=PINNED_SEED,
        certificates=["lemma_inequalities", "riccati_bound", "theorem51"],
    )


PRESETS: Dict[str, Callable[[], RunConfig]] = {
    "example-6-1": lambda: _example("example-6-1", 0.0, 4.0, ["growth_bound", "lemma_inequalities"]),
    "example-6-2-delta-1": lambda: _example("example-6-2-delta-1", 1.0, 10.0, ["lemma_inequalities", "riccati_bound"]),
    "example-6-2-delta-0.1": lambda: _example("example-6-2-delta-0.1", 0.1, 10.0, ["lemma_inequalities", "riccati_bound"]),
    "example-6-3": lambda: _stage_example("example-6-3", 0.0, ["growth_bound"]),
    "example-6-4": lambda: _stage_example("example-6-4", 1.0, ["riccati_bound"]),
    "two-particle": _two_particle,
    "three-particle": _three_particle,
    "theorem-3-1": _theorem31,
    "theorem-4-1": _theorem41,
    "theorem-5-1": _theorem51,
    # Negative controls: each is built to violate the named certificate.
    "theorem-3-1-capacity-deficit": lambda: _theorem31(
        "theorem-3-1-capacity-deficit", kappa_s=0.05, psi_s=WeightSpec.exponential(1.0, 2.0)
    ),
    "lyapunov-weak-intra": lambda: _theorem31("lyapunov-weak-intra", kappa_s=0.1, kappa_d=2.0).with_overrides(
        {"certificates": ["lyapunov"], "sim.t_end": 2.0}
    ),
    "theorem-4-1-constant-inter": lambda: _theorem41("theorem-4-1-constant-inter", psi_d=WeightSpec.constant(1.0)),
    "theorem-4-1-no-intra": lambda: _theorem41("theorem-4-1-no-intra", kappa_s=0.0),
    "theorem-5-1-weak-intra": lambda: _theorem51("theorem-5-1-weak-intra", kappa_s=0.2),
}


def preset_names() -> List[str]:
    return sorted(PRESETS)


def preset(name: str) -> RunConfig:
    """Fully populated RunConfig for a catalog name."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}'; available: {', '.join(preset_names())}")
    return PRESETS[name]()
