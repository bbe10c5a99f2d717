"""
VAE-GAN Models
Configuration, encoder outputs and training logs
"""

from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator


class GenerativeScope(str, Enum):
    """Rows that feed the reconstruction, KL and adversarial terms"""
    MINORITY = "minority"
    ALL = "all"


class VaeGanConfig(BaseModel):
    """Architecture and training settings"""
    input_dim: int = Field(default=30, ge=1)
    latent_dim: int = Field(default=2, ge=1)
    encoder_hidden: List[int] = Field(default_factory=lambda: [16, 8])
    decoder_hidden: List[int] = Field(default_factory=lambda: [8, 16])
    discriminator_hidden: List[int] = Field(default_factory=lambda: [16, 8])
    kl_weight: float = Field(default=0.1, gt=0.0)
    recon_weight: float = Field(default=1.0, ge=0.0)
    gan_weight: float = Field(default=0.1, ge=0.0)
    epochs: int = Field(default=100, ge=1)
    batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    patience: int = Field(default=10, ge=1)
    min_precision: float = Field(default=0.85, ge=0.0, le=1.0)
    logvar_clip: float = Field(default=10.0, gt=0.0)
    generative_scope: GenerativeScope = GenerativeScope.MINORITY
    silhouette_max_rows: int = Field(default=2000, ge=0)
    seed: int = Field(default=0, ge=0)

    class Config:
        json_schema_extra = {
            "example": {
                "input_dim": 30,
                "latent_dim": 2,
                "kl_weight": 0.1,
                "epochs": 100,
                "batch_size": 64,
                "generative_scope": "minority",
                "seed": 42,
            }
        }

    @validator("encoder_hidden", "decoder_hidden", "discriminator_hidden")
    def hidden_positive(cls, v):
        if any(h < 1 for h in v):
            raise ValueError("hidden sizes must be positive")
        return v


class EncoderOutput(BaseModel):
    """mu, logvar, the drawn noise and z = mu + exp(logvar / 2) * eps"""
    mu: np.ndarray
    logvar: np.ndarray
    eps: np.ndarray
    z: np.ndarray

    class Config:
        arbitrary_types_allowed = True

    @root_validator(skip_on_failure=True)
    def consistent(cls, values):
        shapes = {values[k].shape for k in ("mu", "logvar", "eps", "z")}
        if len(shapes) != 1:
            raise ValueError("encoder output arrays differ in shape")
        for k in ("mu", "logvar", "z"):
            if not np.all(np.isfinite(values[k])):
                raise ValueError(f"{k} is not finite")
        return values


class VaeLossBreakdown(BaseModel):
    total: float
    recon: float
    kl: float


class EpochLog(BaseModel):
    """Per-epoch training record"""
    epoch: int
    recon_loss: float = 0.0
    kl_loss: float = 0.0
    disc_loss: float = 0.0
    gen_adv_loss: float = 0.0
    head_loss: Optional[float] = None
    phase2_encoder_grad_norm: float = 0.0
    val_recon_loss: Optional[float] = None
    val_precision: Optional[float] = None
    val_recall: Optional[float] = None
    val_silhouette: Optional[float] = None


class TrainingLog(BaseModel):
    epochs: List[EpochLog] = Field(default_factory=list)
    best_epoch: Optional[int] = None
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.epochs)
