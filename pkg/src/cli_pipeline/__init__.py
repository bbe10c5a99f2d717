"""
CLI Pipeline Module - LatentGuard v1.0
Experiment orchestration: configuration, seeded runs, checkpoints and exports

This module handles:
- Flat YAML configs with environment and flag overrides
- The end-to-end grid over synthetic counts and classifiers
- Checkpoint save/load for every model kind
- Augmented-data and latent-space CSV exports
- The gradient-check developer suite
"""

from .checkpoint_service import load_checkpoint, save_checkpoint
from .cli import build_parser, main
from .config_loader import dump_config, load_config, read_config_file
from .grad_suite import PROBES, format_table, run_grad_suite
from .models import (
    CellResult,
    ClassifierKind,
    ExperimentConfig,
    OversampleMethod,
    PreparedData,
    PretrainMethod,
    RunReport,
    ThresholdMode,
)
from .pipeline_service import (
    Oversampler,
    export_augmented_csv,
    export_latent,
    export_oversample_projection,
    load_oversampler,
    prepare_data,
    run_experiment,
    train_classifier,
    train_oversampler,
)

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "build_parser",
    "main",
    "dump_config",
    "load_config",
    "read_config_file",
    "PROBES",
    "format_table",
    "run_grad_suite",
    "CellResult",
    "ClassifierKind",
    "ExperimentConfig",
    "OversampleMethod",
    "PreparedData",
    "PretrainMethod",
    "RunReport",
    "ThresholdMode",
    "Oversampler",
    "export_augmented_csv",
    "export_latent",
    "export_oversample_projection",
    "load_oversampler",
    "prepare_data",
    "run_experiment",
    "train_classifier",
    "train_oversampler",
]

__version__ = "1.0.0"
