"""
Logistic Regression
Baseline classifier trained by full-batch gradient descent on BCE + L2
"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..common.errors import NotFittedError, ShapeMismatchError, SingleClassError, TrainingDivergedError
from ..neural_core.checkpoint import load_checkpoint, save_checkpoint
from ..neural_core.functional import bce_loss, sigmoid
from .models import LogRegConfig, LogRegParams

logger = logging.getLogger(__name__)

CHECKPOINT_KIND = "logreg"


def logreg_fit(
    x: np.ndarray,
    y: np.ndarray,
    epochs: int = 500,
    lr: float = 0.1,
    l2: float = 1e-4,
    seed: int = 0,
) -> LogRegParams:
    """
    Minimize mean BCE + (l2 / 2) * ||w||^2 from zero weights

    seed is recorded for provenance; the zero start makes the fit deterministic.

    Raises:
        SingleClassError: y contains one class
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ShapeMismatchError("rows and labels differ")
    if np.unique(y).size < 2:
        raise SingleClassError("logistic regression needs both classes")

    n, d = x.shape
    w, b = np.zeros(d), 0.0
    for epoch in range(epochs):
        p = sigmoid(x @ w + b)
        err = (p - y) / n
        grad_w = x.T @ err + l2 * w
        grad_b = float(err.sum())
        w -= lr * grad_w
        b -= lr * grad_b
        if not np.all(np.isfinite(w)) or not np.isfinite(b):
            raise TrainingDivergedError("logistic regression diverged", epoch=epoch)
    logger.info(
        "Logistic regression fitted on %d rows: final BCE %.5f, |w| %.4f",
        n, bce_loss(y, sigmoid(x @ w + b)), float(np.linalg.norm(w)),
    )
    return LogRegParams(weights=w.tolist(), bias=b, l2=l2)


def logreg_predict(params: LogRegParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(params.weights)
    if x.ndim != 2 or x.shape[1] != w.size:
        raise ShapeMismatchError(f"expected (*, {w.size}) input, got {x.shape}")
    return sigmoid(x @ w + params.bias)


class LogisticRegressionClassifier:
    """fit/predict_proba wrapper with checkpointing"""

    def __init__(self, config: Optional[LogRegConfig] = None):
        self.config = config or LogRegConfig()
        self.params: Optional[LogRegParams] = None

    def fit(self, x: np.ndarray, y: np.ndarray) -> "LogisticRegressionClassifier":
        cfg = self.config
        self.params = logreg_fit(x, y, cfg.epochs, cfg.learning_rate, cfg.l2, cfg.seed)
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        if self.params is None:
            raise NotFittedError("LogisticRegressionClassifier has not been fitted")
        return logreg_predict(self.params, x)

    def save(self, path: Union[str, Path]) -> Path:
        if self.params is None:
            raise NotFittedError("LogisticRegressionClassifier has not been fitted")
        arrays = {"weights": np.asarray(self.params.weights), "bias": np.array([self.params.bias])}
        return save_checkpoint(path, CHECKPOINT_KIND, arrays, self.config.dict())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LogisticRegressionClassifier":
        doc = load_checkpoint(path, expected_kind=CHECKPOINT_KIND)
        clf = cls(LogRegConfig.parse_obj(doc.config))
        arrays = doc.array_dict()
        clf.params = LogRegParams(
            weights=arrays["weights"].tolist(), bias=float(arrays["bias"][0]), l2=clf.config.l2
        )
        return clf
