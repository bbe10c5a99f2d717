"""
Pipeline Models
Experiment configuration and run reports
"""

import json
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from ..data_ingest.models import Dataset, SplitIndices
from ..data_ingest.normalizer import RobustNormalizer
from ..eval_metrics.models import MetricsReport
from ..neural_core.models import FocalConfig, LossMode
from ..vaegan_core.models import GenerativeScope


class OversampleMethod(str, Enum):
    NONE = "none"
    SMOTE = "smote"
    VAEGAN = "vaegan"
    VAEGAN_MLP1 = "vaegan-mlp1"
    VAEGAN_MLP2 = "vaegan-mlp2"
    VAEGAN_MLP3 = "vaegan-mlp3"
    VAEGAN_CPAC = "vaegan-cpac"

    @property
    def uses_vaegan(self) -> bool:
        return self.value.startswith("vaegan")

    @property
    def head_kind(self) -> Optional[str]:
        """Latent head trained jointly with the VAE-GAN, if any"""
        if self.value.startswith("vaegan-"):
            return self.value.split("-", 1)[1]
        return None


class ClassifierKind(str, Enum):
    LOGREG = "logreg"
    CPAC = "cpac"
    MLP1 = "mlp1"
    MLP2 = "mlp2"
    MLP3 = "mlp3"


class ThresholdMode(str, Enum):
    FIXED = "fixed"
    AGENT = "agent"


class PretrainMethod(str, Enum):
    SMOTE = "smote"
    VAEGAN = "vaegan"


class ExperimentConfig(BaseModel):
    """
    One experiment: data, split, oversampler, classifiers and outputs

    data_path=None runs on the bundled synthetic generator.
    """
    data_path: Optional[str] = None
    drop_time: bool = False
    synthetic_rows: int = Field(default=20_000, ge=4)
    synthetic_features: int = Field(default=30, ge=2)
    synthetic_minority_fraction: float = Field(default=0.005, gt=0.0, lt=0.5)
    synthetic_separation: float = Field(default=4.0, ge=0.0)
    synthetic_shifted: int = Field(default=5, ge=1)

    train_ratio: float = Field(default=0.7, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)

    method: OversampleMethod = OversampleMethod.NONE
    pretrain_smote: int = Field(default=0, ge=0)
    pretrain_method: PretrainMethod = PretrainMethod.SMOTE
    counts: List[int] = Field(default_factory=lambda: [50, 75, 100])
    smote_k: int = Field(default=5, ge=1)

    latent_dim: int = Field(default=2, ge=1)
    vaegan_epochs: int = Field(default=100, ge=1)
    vaegan_batch_size: int = Field(default=64, ge=1)
    vaegan_learning_rate: float = Field(default=1e-3, gt=0.0)
    vaegan_patience: int = Field(default=10, ge=1)
    generative_scope: GenerativeScope = GenerativeScope.MINORITY

    classifiers: List[ClassifierKind] = Field(default_factory=lambda: [ClassifierKind.LOGREG])
    loss_mode: LossMode = LossMode.FOCAL
    head_loss_mode: LossMode = LossMode.BCE
    focal: FocalConfig = Field(default_factory=FocalConfig)
    clf_epochs: int = Field(default=50, ge=1)
    clf_batch_size: int = Field(default=256, ge=1)
    clf_learning_rate: float = Field(default=1e-3, gt=0.0)
    clf_patience: int = Field(default=10, ge=1)
    logreg_epochs: int = Field(default=500, ge=1)
    logreg_learning_rate: float = Field(default=0.1, gt=0.0)
    logreg_l2: float = Field(default=1e-4, ge=0.0)

    threshold_mode: ThresholdMode = ThresholdMode.FIXED
    threshold: float = Field(default=0.5, gt=0.0, lt=1.0)

    no_head: bool = False
    no_attention: bool = False
    no_prototypes: bool = False
    no_penalties: bool = False

    n_jobs: int = 1
    output_dir: str = "runs/latest"

    class Config:
        json_schema_extra = {
            "example": {
                "data_path": "data/creditcard.csv",
                "method": "vaegan-cpac",
                "pretrain_smote": 75,
                "counts": [50, 75, 100],
                "classifiers": ["logreg"],
                "threshold_mode": "agent",
                "seed": 0,
                "output_dir": "runs/cpac",
            }
        }

    @validator("counts")
    def counts_positive(cls, v):
        if not v:
            raise ValueError("counts must not be empty")
        if any(c <= 0 for c in v):
            raise ValueError("counts must be positive")
        return v

    @validator("classifiers")
    def classifiers_present(cls, v):
        if not v:
            raise ValueError("at least one classifier is required")
        return v

    @validator("n_jobs")
    def n_jobs_nonzero(cls, v):
        if v == 0:
            raise ValueError("n_jobs must be nonzero")
        return v

    @root_validator(skip_on_failure=True)
    def ablations_need_cpac(cls, values):
        method = values["method"]
        if values["no_head"] and method.head_kind is None:
            raise ValueError("no_head only applies to methods with a latent head")
        cpac_in_use = method == OversampleMethod.VAEGAN_CPAC or ClassifierKind.CPAC in values["classifiers"]
        flags = [f for f in ("no_attention", "no_prototypes", "no_penalties") if values[f]]
        if flags and not cpac_in_use:
            raise ValueError(f"{', '.join(flags)} only apply to CPAC-bearing methods")
        return values

    @property
    def grid_counts(self) -> List[int]:
        """Synthetic counts evaluated; a single 0 when nothing is oversampled"""
        return [0] if self.method == OversampleMethod.NONE else list(self.counts)

    def echo(self) -> dict:
        """JSON-ready copy of the config"""
        return json.loads(self.json())


class PreparedData(BaseModel):
    """Parsed dataset, its split and the normalized train/validation matrices"""
    dataset: Dataset
    split: SplitIndices
    normalizer: RobustNormalizer
    train_x: np.ndarray
    train_y: np.ndarray
    val_x: np.ndarray
    val_y: np.ndarray

    class Config:
        arbitrary_types_allowed = True

    @property
    def train_frauds(self) -> np.ndarray:
        return self.train_x[self.train_y == 1]

    @property
    def val_frauds(self) -> np.ndarray:
        return self.val_x[self.val_y == 1]

    @property
    def n_features(self) -> int:
        return int(self.train_x.shape[1])


class CellResult(BaseModel):
    """Metrics of one (count, classifier) cell"""
    count: int = Field(..., ge=0)
    classifier: ClassifierKind
    metrics: MetricsReport
    threshold_best_f1: Optional[float] = None
    checkpoint: Optional[str] = None


class RunReport(BaseModel):
    """Result of run_experiment"""
    config: dict
    seed: int
    cells: List[CellResult] = Field(default_factory=list)
    silhouette: Dict[str, float] = Field(default_factory=dict)
    checkpoints: Dict[str, str] = Field(default_factory=dict)
    oversampler_epochs: Optional[int] = None
    wall_clock_seconds: float = 0.0

    @root_validator(skip_on_failure=True)
    def one_cell_per_key(cls, values):
        keys = [(c.count, c.classifier) for c in values["cells"]]
        if len(keys) != len(set(keys)):
            raise ValueError("duplicate (count, classifier) cell")
        return values

    def cell(self, count: int, classifier: ClassifierKind) -> CellResult:
        for c in self.cells:
            if c.count == count and c.classifier == ClassifierKind(classifier):
                return c
        raise KeyError(f"no cell for count={count}, classifier={classifier}")

    def to_document(self) -> dict:
        return json.loads(self.json())

    def to_markdown(self) -> str:
        """Per-count x classifier table with percentages"""
        method = self.config.get("method", "none")
        lines = [
            f"# LatentGuard run: {method}",
            "",
            f"seed {self.seed}",
            "",
            "| Samples | Classifier | Precision | Recall | F1 | AUC-ROC | Threshold |",
            "|---|---|---|---|---|---|---|",
        ]
        for c in sorted(self.cells, key=lambda c: (c.count, c.classifier.value)):
            m = c.metrics
            auc = "-" if m.auc_roc is None else f"{100 * m.auc_roc:.2f}"
            lines.append(
                f"| {c.count} | {c.classifier.value} | {100 * m.precision:.2f} | {100 * m.recall:.2f} "
                f"| {100 * m.f1:.2f} | {auc} | {m.threshold:.4f} |"
            )
        if self.silhouette:
            lines += ["", "| Latent | Silhouette |", "|---|---|"]
            lines += [f"| {k} | {v:.4f} |" for k, v in sorted(self.silhouette.items())]
        return "\n".join(lines) + "\n"
