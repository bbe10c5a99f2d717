"""
SMOTE Service
Interpolate between minority rows and their nearest minority neighbors
"""

import logging
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..common.errors import NotFittedError
from .models import SmoteConfig

logger = logging.getLogger(__name__)


def knn_minority(x_fraud: np.ndarray, k: int) -> np.ndarray:
    """
    Nearest-neighbor table among minority rows

    Args:
        x_fraud: Minority rows (n x d), normalized
        k: Neighbors per row, k < n

    Returns:
        Integer table (n x k); row i lists the k nearest rows to i excluding i,
        ties broken by lower index
    """
    x = np.asarray(x_fraud, dtype=np.float64)
    n = x.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if n <= k:
        raise ValueError(f"need more than k={k} minority rows, got {n}")
    dist = cdist(x, x, metric="euclidean")
    np.fill_diagonal(dist, np.inf)
    return np.argsort(dist, axis=1, kind="stable")[:, :k]


def interpolate(
    x_fraud: np.ndarray, base_idx: np.ndarray, neighbor_idx: np.ndarray, alphas: np.ndarray
) -> np.ndarray:
    """x_i + alpha * (x_j - x_i) for each (i, j, alpha)"""
    base = x_fraud[base_idx]
    return base + alphas[:, None] * (x_fraud[neighbor_idx] - base)


class SmoteSampler:
    """
    Oversampler over a fixed set of minority rows

    fit builds the neighbor table once; sample can then be called with
    different counts and seeds.
    """

    def __init__(self, k_neighbors: int = 5):
        if k_neighbors < 1:
            raise ValueError("k_neighbors must be at least 1")
        self.k_neighbors = k_neighbors
        self._x: Optional[np.ndarray] = None
        self._table: Optional[np.ndarray] = None

    @property
    def is_fitted(self) -> bool:
        return self._table is not None

    def fit(self, x_fraud: np.ndarray) -> "SmoteSampler":
        x = np.asarray(x_fraud, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 2:
            raise ValueError("SMOTE needs at least 2 minority rows")
        self._x = x
        self._table = knn_minority(x, self.k_neighbors)
        logger.info("SMOTE fitted on %d minority rows (k=%d)", x.shape[0], self.k_neighbors)
        return self

    def sample(self, n_samples: int, seed: int = 0) -> np.ndarray:
        """
        Draw synthetic rows

        Base rows are drawn uniformly with replacement, the partner uniformly
        from the base row's neighbors and alpha uniformly from [0, 1).
        """
        if self._table is None or self._x is None:
            raise NotFittedError("SmoteSampler has not been fitted")
        if n_samples < 0:
            raise ValueError("n_samples must be non-negative")
        rng = np.random.default_rng(seed)
        n = self._x.shape[0]
        base = rng.integers(0, n, size=n_samples)
        slot = rng.integers(0, self.k_neighbors, size=n_samples)
        alphas = rng.random(n_samples)
        out = interpolate(self._x, base, self._table[base, slot], alphas)
        logger.debug("SMOTE generated %d rows with seed %d", n_samples, seed)
        return out


def generate(x_fraud: np.ndarray, cfg: SmoteConfig) -> np.ndarray:
    """
    Generate cfg.n_samples synthetic minority rows

    Raises:
        ValueError: fewer than 2 minority rows, or not more rows than k
    """
    return SmoteSampler(cfg.k_neighbors).fit(x_fraud).sample(cfg.n_samples, seed=cfg.seed)
