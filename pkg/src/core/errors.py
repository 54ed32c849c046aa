"""Exception hierarchy for the biflock simulator."""

from typing import Any, Optional


class BiflockError(Exception):
    """Base class for all simulator errors."""


class DomainError(BiflockError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeMismatchError(BiflockError, ValueError):
    """State arrays are inconsistent with the model parameters."""


class PreconditionError(BiflockError, ValueError):
    """An operation was called without its precondition holding."""


class ConfigError(BiflockError):
    """Invalid run configuration, config file, preset or certificate name."""


class InfeasibleError(BiflockError):
    """No flocking radius exists for the given initial spreads."""

    def __init__(self, message: str, deficit: float):
        super().__init__(message)
        self.deficit = deficit


class DivergenceError(BiflockError):
    """Integration produced non-finite coordinates."""

    def __init__(self, message: str, time: float, trajectory: Optional[Any] = None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory
