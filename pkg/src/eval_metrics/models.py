"""
Evaluation Models
Confusion counts, metric reports, threshold-agent settings and projections
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator


class ConfusionCounts(BaseModel):
    tp: int = Field(..., ge=0)
    fp: int = Field(..., ge=0)
    tn: int = Field(..., ge=0)
    fn: int = Field(..., ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


class MetricsReport(BaseModel):
    """Classification metrics at one threshold"""
    tp: int = Field(..., ge=0)
    fp: int = Field(..., ge=0)
    tn: int = Field(..., ge=0)
    fn: int = Field(..., ge=0)
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    f1: float = Field(..., ge=0.0, le=1.0)
    auc_roc: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    composite: float = Field(..., ge=0.0, le=1.0)
    threshold: float = Field(..., ge=0.0, le=1.0)

    class Config:
        json_schema_extra = {
            "example": {
                "tp": 121, "fp": 9, "tn": 85286, "fn": 27,
                "precision": 0.9308, "recall": 0.8176, "f1": 0.8705,
                "auc_roc": 0.9712, "composite": 0.8742, "threshold": 0.5,
            }
        }

    @property
    def counts(self) -> ConfusionCounts:
        return ConfusionCounts(tp=self.tp, fp=self.fp, tn=self.tn, fn=self.fn)


class ThresholdAgentConfig(BaseModel):
    """Sigmoid-relaxed threshold search"""
    sharpness: float = Field(default=50.0, gt=0.0)
    learning_rate: float = Field(default=0.05, gt=0.0)
    steps: int = Field(default=2000, ge=1)
    theta_init: float = 0.0


class ThresholdFit(BaseModel):
    """Chosen threshold and the descent trajectory that produced it"""
    threshold: float = Field(..., gt=0.0, lt=1.0)
    best_f1: float = Field(..., ge=0.0, le=1.0)
    taus: List[float] = Field(default_factory=list)
    losses: List[float] = Field(default_factory=list)
    f1_scores: List[float] = Field(default_factory=list)
    degenerate: bool = False

    @root_validator(skip_on_failure=True)
    def trajectory_aligned(cls, values):
        n = len(values["taus"])
        if len(values["losses"]) != n or len(values["f1_scores"]) != n:
            raise ValueError("trajectory lists differ in length")
        return values


class PcaProjection(BaseModel):
    """Principal-component projection of a matrix"""
    coords: np.ndarray
    explained_ratio: np.ndarray
    components: np.ndarray
    mean: np.ndarray

    class Config:
        arbitrary_types_allowed = True

    @validator("explained_ratio")
    def ratios_in_range(cls, v):
        if np.any(v < -1e-12) or np.any(v > 1.0 + 1e-12):
            raise ValueError("explained variance ratios must lie in [0, 1]")
        return v
