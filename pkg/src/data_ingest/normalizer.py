"""
Robust Normalizer
Median/IQR scaling fitted on training rows only
"""

import logging
from typing import List, Optional

import numpy as np

from ..common.errors import NotFittedError, ShapeMismatchError
from .models import NormalizationParams

logger = logging.getLogger(__name__)


def fit_normalizer(train_features: np.ndarray, columns: Optional[List[str]] = None) -> NormalizationParams:
    """
    Fit per-column median and interquartile range

    Quantiles use linear interpolation between order statistics. A zero IQR
    is stored as a unit divisor.

    Args:
        train_features: Training matrix (n x d), n >= 1
        columns: Optional column names stored with the parameters

    Returns:
        NormalizationParams
    """
    x = np.asarray(train_features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("fit_normalizer needs a non-empty 2-D matrix")

    q1, median, q3 = np.quantile(x, [0.25, 0.5, 0.75], axis=0, method="linear")
    iqr = q3 - q1
    constant = iqr <= 0
    if constant.any():
        logger.warning("%d column(s) have zero IQR; using a unit divisor", int(constant.sum()))
    iqr = np.where(constant, 1.0, iqr)
    return NormalizationParams(medians=median, iqrs=iqr, columns=list(columns or []))


def apply_normalizer(params: NormalizationParams, features: np.ndarray) -> np.ndarray:
    """
    Normalize rows: (x - median) / divisor

    Args:
        params: Fitted parameters
        features: Matrix with params.n_features columns

    Returns:
        Normalized copy
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.n_features:
        raise ShapeMismatchError(
            f"expected {params.n_features} columns, got shape {x.shape}"
        )
    return (x - params.medians) / params.iqrs


class RobustNormalizer:
    """
    Stateful wrapper around fit/apply

    Features:
    - fit on training rows only
    - transform and inverse transform
    - JSON persistence {medians, divisors, columns}
    """

    def __init__(self, params: Optional[NormalizationParams] = None):
        """Initialize, optionally with fitted parameters"""
        self.params = params

    @property
    def is_fitted(self) -> bool:
        return self.params is not None

    def fit(self, train_features: np.ndarray, columns: Optional[List[str]] = None) -> "RobustNormalizer":
        self.params = fit_normalizer(train_features, columns)
        return self

    def transform(self, features: np.ndarray) -> np.ndarray:
        return apply_normalizer(self._require_params(), features)

    def invert(self, features: np.ndarray) -> np.ndarray:
        """Map normalized rows back to raw units"""
        params = self._require_params()
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != params.n_features:
            raise ShapeMismatchError(f"expected {params.n_features} columns, got shape {x.shape}")
        return x * params.iqrs + params.medians

    def save(self, path) -> None:
        self._require_params().save(path)

    @classmethod
    def load(cls, path) -> "RobustNormalizer":
        return cls(NormalizationParams.load(path))

    def _require_params(self) -> NormalizationParams:
        if self.params is None:
            raise NotFittedError("RobustNormalizer has not been fitted")
        return self.params
