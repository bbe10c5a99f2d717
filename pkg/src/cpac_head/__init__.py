"""
CPAC Head Module - LatentGuard v1.0
Prototype-attention classifier, standalone or as a latent-shaping head
"""

from .cpac import (
    CpacModel,
    anchor_penalty,
    attention,
    cpac_total_loss,
    explain,
    predict,
    scale_penalty,
    weighted_distance,
)
from .models import CpacConfig, CpacEpochLog, CpacExplanation, CpacLossBreakdown, CpacTrainConfig, CpacTrainResult
from .trainer import train_standalone

__all__ = [
    "CpacModel", "anchor_penalty", "attention", "cpac_total_loss", "explain", "predict",
    "scale_penalty", "weighted_distance",
    "CpacConfig", "CpacEpochLog", "CpacExplanation", "CpacLossBreakdown", "CpacTrainConfig", "CpacTrainResult",
    "train_standalone",
]

__version__ = "1.0.0"
