"""Core module."""

from .certificates import CertificateResult, CertificateStatus, certificate_registry, register_certificate
from .integrator import SimConfig, Trajectory, simulate
from .model import ModelParams, SystemState, WeightKind, WeightSpec, rhs
from .pipeline import BaseFlow, FlowResult, engine, register_flow

__all__ = [
    "CertificateResult",
    "CertificateStatus",
    "certificate_registry",
    "register_certificate",
    "SimConfig",
    "Trajectory",
    "simulate",
    "ModelParams",
    "SystemState",
    "WeightKind",
    "WeightSpec",
    "rhs",
    "BaseFlow",
    "FlowResult",
    "engine",
    "register_flow",
]
