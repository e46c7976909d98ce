"""Schemas package."""

from app.schemas.data import SyntheticKindEnum, SyntheticSpec
from app.schemas.solver import AblationCaseEnum, BlufsConfig
from app.schemas.report import EvalReport, EvalRow, MetricEnum
from app.schemas.run import (
    CommandEnum,
    CommandOptions,
    EvalSettings,
    MethodEnum,
    RunConfig,
)
from app.schemas.common import METADATA_KIND, RunMetadata

__all__ = [
    # Data
    "SyntheticKindEnum",
    "SyntheticSpec",
    # Solver
    "AblationCaseEnum",
    "BlufsConfig",
    # Report
    "EvalReport",
    "EvalRow",
    "MetricEnum",
    # Run
    "CommandEnum",
    "CommandOptions",
    "EvalSettings",
    "MethodEnum",
    "RunConfig",
    # Common
    "METADATA_KIND",
    "RunMetadata",
]
