"""
Eval Metrics Module - LatentGuard v1.0
Classification metrics, learned thresholds and latent-space diagnostics
"""

from .metrics import auc_roc, composite, confusion, evaluate, prf, silhouette
from .models import ConfusionCounts, MetricsReport, PcaProjection, ThresholdAgentConfig, ThresholdFit
from .projection import PowerIterationPCA, pca_project
from .threshold_agent import ThresholdAgent, fit_threshold

__all__ = [
    "auc_roc", "composite", "confusion", "evaluate", "prf", "silhouette",
    "ConfusionCounts", "MetricsReport", "PcaProjection", "ThresholdAgentConfig", "ThresholdFit",
    "PowerIterationPCA", "pca_project", "ThresholdAgent", "fit_threshold",
]

__version__ = "1.0.0"
