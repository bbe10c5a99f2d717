"""
Common Module - LatentGuard v1.0
Shared plumbing for every pipeline stage

This module handles:
- Error hierarchy
- Logging configuration
- Environment-backed settings
"""

from .errors import (
    LatentGuardError,
    DataIngestError,
    ShapeMismatchError,
    NotFittedError,
    SingleClassError,
    TrainingDivergedError,
    GradientCheckError,
    CheckpointError,
    CheckpointVersionError,
    ConfigError,
    PipelineStageError,
)
from .logging_config import configure_logging
from .settings import Settings, get_settings

__all__ = [
    "LatentGuardError",
    "DataIngestError",
    "ShapeMismatchError",
    "NotFittedError",
    "SingleClassError",
    "TrainingDivergedError",
    "GradientCheckError",
    "CheckpointError",
    "CheckpointVersionError",
    "ConfigError",
    "PipelineStageError",
    "configure_logging",
    "Settings",
    "get_settings",
]

__version__ = "1.0.0"
