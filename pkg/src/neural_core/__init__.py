"""
Neural Core Module - LatentGuard v1.0
Dense layers, losses, optimizer, gradient checks and checkpoints
"""

from .checkpoint import (
    FORMAT_VERSION,
    ArrayRecord,
    CheckpointDocument,
    load_checkpoint,
    save_checkpoint,
)
from .functional import (
    bce_grad,
    bce_loss,
    clip_probs,
    dropout,
    ensure_finite,
    focal_grad,
    focal_loss,
    kl_divergence,
    kl_grad,
    mse_grad,
    mse_loss,
    relu,
    sigmoid,
    softmax,
)
from .grad_check import grad_check, relative_error
from .heads import ClassificationHead
from .layers import (
    BatchNorm1d,
    Dense,
    Dropout,
    Module,
    Parameter,
    ReLU,
    Sequential,
    Sigmoid,
    batchnorm_forward,
    glorot_uniform,
    linear_forward,
    mlp,
)
from .models import EPSILON, FocalConfig, GradCheckReport, LossMode, OptimizerConfig, OptimizerState
from .optimizer import Adam, adam_update, optimizer_step

__all__ = [
    "FORMAT_VERSION", "ArrayRecord", "CheckpointDocument", "load_checkpoint", "save_checkpoint",
    "bce_grad", "bce_loss", "clip_probs", "dropout", "ensure_finite", "focal_grad", "focal_loss",
    "kl_divergence", "kl_grad", "mse_grad", "mse_loss", "relu", "sigmoid", "softmax",
    "grad_check", "relative_error", "ClassificationHead",
    "BatchNorm1d", "Dense", "Dropout", "Module", "Parameter", "ReLU", "Sequential", "Sigmoid",
    "batchnorm_forward", "glorot_uniform", "linear_forward", "mlp",
    "EPSILON", "FocalConfig", "GradCheckReport", "LossMode", "OptimizerConfig", "OptimizerState",
    "Adam", "adam_update", "optimizer_step",
]

__version__ = "1.0.0"
