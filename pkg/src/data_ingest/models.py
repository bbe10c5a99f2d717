"""
Data Ingest Models
Data models for transactions, datasets, normalization and splits
"""

import json
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

CREDITCARD_FEATURES: List[str] = ["Time"] + [f"V{i}" for i in range(1, 29)] + ["Amount"]
LABEL_COLUMN = "Class"


class TransactionRecord(BaseModel):
    """One row of the credit-card transaction schema"""
    time: float
    components: List[float] = Field(..., min_items=28, max_items=28)  # V1..V28
    amount: float
    label: int

    @validator("label")
    def label_binary(cls, v):
        """Labels are exactly 0 or 1"""
        if v not in (0, 1):
            raise ValueError("label must be 0 or 1")
        return v

    @validator("time", "amount")
    def scalar_finite(cls, v):
        if not np.isfinite(v):
            raise ValueError("feature values must be finite")
        return v

    @validator("components")
    def components_finite(cls, v):
        if not np.all(np.isfinite(v)):
            raise ValueError("feature values must be finite")
        return v

    def features(self) -> List[float]:
        """Feature vector in file order"""
        return [self.time, *self.components, self.amount]

    class Config:
        json_schema_extra = {
            "example": {
                "time": 0.0,
                "components": [-1.36, -0.07, 2.54] + [0.0] * 25,
                "amount": 149.62,
                "label": 0,
            }
        }


class Dataset(BaseModel):
    """Row-major feature matrix with binary labels"""
    features: np.ndarray
    labels: np.ndarray
    column_names: List[str]

    @validator("features", pre=True)
    def features_matrix(cls, v):
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("features must be finite")
        return arr

    @validator("labels", pre=True)
    def labels_binary(cls, v):
        arr = np.asarray(v)
        if arr.ndim != 1:
            raise ValueError("labels must be 1-D")
        arr = arr.astype(np.int64)
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ValueError("labels must be 0 or 1")
        return arr

    @root_validator(skip_on_failure=True)
    def shapes_consistent(cls, values):
        features, labels, columns = values["features"], values["labels"], values["column_names"]
        if features.shape[0] != labels.shape[0]:
            raise ValueError(
                f"features have {features.shape[0]} rows but labels have {labels.shape[0]}"
            )
        if features.shape[1] != len(columns):
            raise ValueError(
                f"features have {features.shape[1]} columns but {len(columns)} names were given"
            )
        return values

    @property
    def n_rows(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def class_counts(self) -> dict:
        """Number of rows per class"""
        return {c: int(np.sum(self.labels == c)) for c in (0, 1)}

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Rows selected by index, same columns"""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[idx],
            labels=self.labels[idx],
            column_names=list(self.column_names),
        )

    def drop_columns(self, names: List[str]) -> "Dataset":
        """Copy without the named feature columns"""
        keep = [i for i, c in enumerate(self.column_names) if c not in names]
        return Dataset(
            features=self.features[:, keep],
            labels=self.labels.copy(),
            column_names=[self.column_names[i] for i in keep],
        )

    def record(self, index: int) -> TransactionRecord:
        """Row as a TransactionRecord (credit-card schema only)"""
        if self.column_names != CREDITCARD_FEATURES:
            raise ValueError("record() needs the 30-column credit-card schema")
        row = self.features[index]
        return TransactionRecord(
            time=float(row[0]),
            components=[float(x) for x in row[1:29]],
            amount=float(row[29]),
            label=int(self.labels[index]),
        )

    class Config:
        arbitrary_types_allowed = True


class NormalizationParams(BaseModel):
    """Per-feature median and IQR divisor fitted on training rows"""
    medians: np.ndarray
    iqrs: np.ndarray  # Q3 - Q1, zeros replaced by 1
    columns: List[str] = Field(default_factory=list)

    @validator("medians", "iqrs", pre=True)
    def vector(cls, v):
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("normalization parameters must be 1-D")
        return arr

    @validator("iqrs")
    def divisors_positive(cls, v):
        if not np.all(v > 0):
            raise ValueError("every divisor must be strictly positive")
        return v

    @root_validator(skip_on_failure=True)
    def lengths_match(cls, values):
        if values["medians"].shape != values["iqrs"].shape:
            raise ValueError("medians and iqrs differ in length")
        columns = values.get("columns") or []
        if columns and len(columns) != values["medians"].shape[0]:
            raise ValueError("column names do not match parameter length")
        return values

    @property
    def n_features(self) -> int:
        return int(self.medians.shape[0])

    def to_document(self) -> dict:
        """JSON document {medians, divisors, columns}"""
        return {
            "medians": [float(x) for x in self.medians],
            "divisors": [float(x) for x in self.iqrs],
            "columns": list(self.columns),
        }

    @classmethod
    def from_document(cls, doc: dict) -> "NormalizationParams":
        return cls(medians=doc["medians"], iqrs=doc["divisors"], columns=doc.get("columns", []))

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_document(), indent=2), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "NormalizationParams":
        return cls.from_document(json.loads(Path(path).read_text(encoding="utf-8")))

    class Config:
        arbitrary_types_allowed = True


class SplitIndices(BaseModel):
    """Disjoint train/validation row indices"""
    train_idx: np.ndarray
    val_idx: np.ndarray
    seed: int = Field(..., ge=0)
    train_ratio: Optional[float] = None

    @validator("train_idx", "val_idx", pre=True)
    def index_vector(cls, v):
        arr = np.asarray(v, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("indices must be 1-D")
        return arr

    @root_validator(skip_on_failure=True)
    def disjoint(cls, values):
        if np.intersect1d(values["train_idx"], values["val_idx"]).size:
            raise ValueError("train and validation indices overlap")
        return values

    def covers(self, n_rows: int) -> bool:
        """True when the split partitions range(n_rows)"""
        both = np.concatenate([self.train_idx, self.val_idx])
        return both.size == n_rows and np.array_equal(np.sort(both), np.arange(n_rows))

    def to_document(self) -> dict:
        return {
            "train_idx": self.train_idx.tolist(),
            "val_idx": self.val_idx.tolist(),
            "seed": self.seed,
            "train_ratio": self.train_ratio,
        }

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_document()), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SplitIndices":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))

    class Config:
        arbitrary_types_allowed = True
