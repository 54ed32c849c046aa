"""Experiment configuration, presets and runners."""

from .run_config import RunConfig, InitSpec, SimSettings, OutputSpec
from .presets import preset, preset_names

__all__ = ["RunConfig", "InitSpec", "SimSettings", "OutputSpec", "preset", "preset_names"]
