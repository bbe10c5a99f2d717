"""
CPAC Models
"""

from typing import List, Optional

from pydantic import BaseModel, Field, root_validator

from ..neural_core.models import FocalConfig, LossMode


class CpacConfig(BaseModel):
    """Shape, penalty weights and ablation switches of a prototype-attention classifier"""
    input_dim: int = Field(default=2, ge=1)
    hidden_dim: Optional[int] = Field(default=None, ge=1)
    lambda_scale: float = Field(default=0.001, ge=0.0)
    lambda_anchor: float = Field(default=0.01, ge=0.0)
    alpha_init: float = Field(default=1.0, gt=0.0)
    use_attention: bool = True
    use_prototypes: bool = True
    use_penalties: bool = True
    loss_mode: LossMode = LossMode.BCE
    focal: FocalConfig = Field(default_factory=FocalConfig)
    seed: int = Field(default=0, ge=0)

    class Config:
        json_schema_extra = {
            "example": {"input_dim": 30, "lambda_scale": 0.001, "lambda_anchor": 0.01, "loss_mode": "focal"}
        }

    @property
    def attention_width(self) -> int:
        return self.hidden_dim or max(8, self.input_dim)


class CpacTrainConfig(BaseModel):
    """Standalone training settings"""
    loss_mode: LossMode = LossMode.FOCAL
    focal: FocalConfig = Field(default_factory=FocalConfig)
    epochs: int = Field(default=50, ge=1)
    batch_size: int = Field(default=256, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    patience: int = Field(default=10, ge=1)
    precision_weight: float = Field(default=0.5, ge=0.0, le=1.0)
    recall_weight: float = Field(default=0.5, ge=0.0, le=1.0)
    threshold: float = Field(default=0.5, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)

    @root_validator(skip_on_failure=True)
    def weights_sum_to_one(cls, values):
        if abs(values["precision_weight"] + values["recall_weight"] - 1.0) > 1e-9:
            raise ValueError("composite-score weights must sum to 1")
        return values


class CpacLossBreakdown(BaseModel):
    total: float
    classification: float
    scale: float
    anchor: float


class CpacExplanation(BaseModel):
    """Attention mask, class distances and fraud probability for one row"""
    attention: List[float]
    d0: Optional[float] = None
    d1: Optional[float] = None
    prob: float = Field(..., ge=0.0, le=1.0)
    contributions0: Optional[List[float]] = None
    contributions1: Optional[List[float]] = None


class CpacEpochLog(BaseModel):
    epoch: int
    train_loss: float
    val_precision: float
    val_recall: float
    val_score: float


class CpacTrainResult(BaseModel):
    history: List[CpacEpochLog] = Field(default_factory=list)
    best_epoch: Optional[int] = None
    best_score: float = 0.0
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.history)
