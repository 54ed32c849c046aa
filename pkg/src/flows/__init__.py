"""Flows module - the stages of one run."""

from .initial_flow import InitialConditionsFlow
from .integration_flow import IntegrationFlow
from .analysis_flow import AnalysisFlow
from .certification_flow import CertificationFlow
from .export_flow import ExportFlow

__all__ = [
    "InitialConditionsFlow",
    "IntegrationFlow",
    "AnalysisFlow",
    "CertificationFlow",
    "ExportFlow",
]
