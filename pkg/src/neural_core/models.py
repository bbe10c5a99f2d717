"""
Neural Core Models
Configuration and state models for layers, losses and the optimizer
"""

from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, validator

# Probabilities are clipped to [EPSILON, 1 - EPSILON] before any log
EPSILON = 1e-7


class LossMode(str, Enum):
    """Classification loss selection"""
    BCE = "bce"
    FOCAL = "focal"


class FocalConfig(BaseModel):
    """Focal loss hyperparameters"""
    alpha_fl: float = Field(default=0.95, ge=0.0, le=1.0)
    gamma: float = Field(default=2.0, ge=0.0)

    class Config:
        json_schema_extra = {"example": {"alpha_fl": 0.95, "gamma": 2.0}}


class OptimizerConfig(BaseModel):
    """Adaptive-moment optimizer settings"""
    learning_rate: float = Field(default=1e-3, gt=0.0)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    epsilon: float = Field(default=1e-8, gt=0.0)


class OptimizerState(BaseModel):
    """Per-parameter moment accumulators plus the step counter"""
    config: OptimizerConfig = Field(default_factory=OptimizerConfig)
    step_count: int = Field(default=0, ge=0)
    first_moments: List[np.ndarray] = Field(default_factory=list)
    second_moments: List[np.ndarray] = Field(default_factory=list)

    class Config:
        arbitrary_types_allowed = True


class GradCheckReport(BaseModel):
    """Result of comparing analytic gradients with central differences"""
    name: str = "probe"
    max_rel_error: float
    worst_parameter: Optional[str] = None
    worst_index: Optional[List[int]] = None
    n_checked: int = 0
    tolerance: float = 1e-4
    step: float = 1e-5

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance

    @validator("max_rel_error")
    def error_finite(cls, v):
        if not np.isfinite(v):
            raise ValueError("relative error must be finite")
        return v
