"""Typed run configuration: model, integration, initial data, outputs, certificates."""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.certificates import certificate_registry
from ..core.errors import ConfigError
from ..core.model import ModelParams, validate_params

MAX_SEED = (1 << 64) - 1


class InitKind(str, Enum):
    RANDOM_BOX = "random_box"
    EXPLICIT = "explicit"


class VelocityCentering(str, Enum):
    PER_GROUP = "per_group"
    GLOBAL = "global"


class Box(BaseModel):
    """Axis-aligned box [lower, upper]."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lower: List[float]
    upper: List[float]

    @model_validator(mode="after")
    def _nonempty(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("box corners must be nonempty and share a dimension")
        if any(hi <= lo for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("box must have positive extent on every axis")
        return self

    @classmethod
    def unit(cls, dim: int) -> "Box":
        return cls(lower=[0.0] * dim, upper=[1.0] * dim)


class ExplicitState(BaseModel):
    """Positions and velocities given row by row."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    x: List[List[float]]
    v: List[List[float]]
    y: List[List[float]]
    w: List[List[float]]


class InitSpec(BaseModel):
    """How the initial state is produced.

    Boxes default to the unit cube of the model dimension. ``drift1`` and
    ``drift2`` are added to each group's velocities after centering.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: InitKind = InitKind.RANDOM_BOX
    box1: Optional[Box] = None
    box2: Optional[Box] = None
    velocity_scale: float = Field(default=1.0, gt=0)
    velocity_centering: VelocityCentering = VelocityCentering.PER_GROUP
    drift1: Optional[List[float]] = None
    drift2: Optional[List[float]] = None
    explicit: Optional[ExplicitState] = None

    @model_validator(mode="after")
    def _explicit_present(self):
        if self.kind == InitKind.EXPLICIT and self.explicit is None:
            raise ValueError("kind = explicit needs init.explicit.{x,v,y,w}")
        return self


class SimSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = Field(default=1e-3, gt=0)
    t_end: float = Field(default=10.0, gt=0)
    sample_stride: int = Field(default=10, ge=1)


class OutputSpec(BaseModel):
    """Artifact locations, relative to ``dir``."""

    dir: str = "./output"
    csv: str = "frames.csv"
    json_name: str = Field(default="summary.json", alias="json")
    states: str = "states.csv"
    dump_states: bool = False

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    @property
    def csv_path(self) -> Path:
        return Path(self.dir) / self.csv

    @property
    def json_path(self) -> Path:
        return Path(self.dir) / self.json_name

    @property
    def states_path(self) -> Path:
        return Path(self.dir) / self.states


class RunConfig(BaseModel):
    """One fully specified experiment."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "custom"
    model: ModelParams
    sim: SimSettings = Field(default_factory=SimSettings)
    init: InitSpec = Field(default_factory=InitSpec)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    outputs: OutputSpec = Field(default_factory=OutputSpec)
    certificates: Dict[str, Dict[str, Any]] = Field(default_factory=dict)

    @field_validator("certificates", mode="before")
    @classmethod
    def _certificate_list(cls, value):
        if value is None:
            return {}
        if isinstance(value, str):
            value = [item.strip() for item in value.split(",") if item.strip()]
        if isinstance(value, (list, tuple)):
            return {str(item): {} for item in value}
        return value

    @model_validator(mode="after")
    def _check(self):
        violations = validate_params(self.model)
        if violations:
            raise ValueError(f"invalid model parameters: {', '.join(violations)}")
        unknown = sorted(set(self.certificates) - set(certificate_registry.names()))
        if unknown:
            raise ValueError(f"unknown certificates {unknown}; known: {', '.join(certificate_registry.names())}")
        return self

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "RunConfig":
        """Validate a plain mapping, raising ConfigError on any problem."""
        try:
            return cls.model_validate(data)
        except ValidationError as err:
            raise ConfigError(f"invalid run configuration: {err}") from err

    def echo(self) -> Dict[str, Any]:
        """JSON-ready dump that parses back to an equal config."""
        return self.model_dump(mode="json", by_alias=True)

    def with_overrides(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Apply ``dotted.key -> value`` overrides; unknown keys raise ConfigError."""
        data = self.echo()
        for key, value in overrides.items():
            _set_dotted(data, key, value)
        return RunConfig.from_mapping(data)


def _set_dotted(data: Dict[str, Any], key: str, value: Any) -> None:
    parts = key.split(".")
    if not all(parts):
        raise ConfigError(f"malformed key '{key}'")
    # Below certificates, or below an unset optional section, keys are new.
    open_ended = parts[0] == "certificates"
    node = data
    for part in parts[:-1]:
        if part not in node and not open_ended:
            raise ConfigError(f"unknown config key '{key}'")
        if node.get(part) is None:
            node[part] = {}
            open_ended = True
        if not isinstance(node[part], dict):
            raise ConfigError(f"config key '{key}' descends into a scalar")
        node = node[part]
    if parts[-1] not in node and not open_ended:
        raise ConfigError(f"unknown config key '{key}'")
    node[parts[-1]] = value
