"""
Classifier Head Models
"""

from typing import List

import numpy as np
from pydantic import BaseModel, Field, validator

from ..neural_core.models import FocalConfig, LossMode


class MlpHeadConfig(BaseModel):
    """
    Latent MLP head

    variant 1: 32 hidden units
    variant 2: 64 hidden units with batch normalization and dropout
    variant 3: 128 then 64 hidden units
    """
    variant: int = Field(default=1, ge=1, le=3)
    input_dim: int = Field(default=2, ge=1)
    dropout: float = Field(default=0.2, ge=0.0, lt=1.0)
    loss_mode: LossMode = LossMode.BCE
    focal: FocalConfig = Field(default_factory=FocalConfig)
    seed: int = Field(default=0, ge=0)


class LogRegConfig(BaseModel):
    """Full-batch gradient descent settings"""
    epochs: int = Field(default=500, ge=1)
    learning_rate: float = Field(default=0.1, gt=0.0)
    l2: float = Field(default=1e-4, ge=0.0)
    seed: int = Field(default=0, ge=0)

    class Config:
        json_schema_extra = {"example": {"epochs": 500, "learning_rate": 0.1, "l2": 0.0001}}


class LogRegParams(BaseModel):
    weights: List[float]
    bias: float = 0.0
    l2: float = Field(default=0.0, ge=0.0)

    @validator("weights")
    def finite_weights(cls, v):
        if not np.all(np.isfinite(v)):
            raise ValueError("weights must be finite")
        return v

    @validator("bias")
    def finite_bias(cls, v):
        if not np.isfinite(v):
            raise ValueError("bias must be finite")
        return v
