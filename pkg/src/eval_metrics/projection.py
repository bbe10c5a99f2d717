"""
Projection
Principal components by power iteration with deflation
"""

import logging
from typing import List, Optional

import numpy as np

from ..common.errors import NotFittedError
from .models import PcaProjection

logger = logging.getLogger(__name__)


class PowerIterationPCA:
    """
    PCA on the sample covariance

    Each component is found by power iteration from a fixed-seed start
    vector, then deflated out of the covariance. Signs are fixed so the
    largest-magnitude loading of each component is positive.
    """

    def __init__(self, n_components: int = 2, max_iter: int = 5000, tol: float = 1e-12, seed: int = 0):
        if n_components < 1:
            raise ValueError("n_components must be at least 1")
        self.n_components = n_components
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed
        self.mean: Optional[np.ndarray] = None
        self.components: Optional[np.ndarray] = None
        self.explained_ratio: Optional[np.ndarray] = None

    def _power_iteration(self, a: np.ndarray, previous: List[np.ndarray], scale: float, rng) -> np.ndarray:
        v = rng.standard_normal(a.shape[0])
        for u in previous:
            v -= np.dot(v, u) * u
        v /= np.linalg.norm(v)
        for _ in range(self.max_iter):
            av = a @ v
            norm = np.linalg.norm(av)
            if norm <= 1e-12 * scale:
                # Remaining spectrum is numerically zero; any orthogonal direction will do
                return v
            v_new = av / norm
            converged = min(np.linalg.norm(v - v_new), np.linalg.norm(v + v_new)) < self.tol
            v = v_new
            if converged:
                break
        return v

    def fit(self, x: np.ndarray) -> "PowerIterationPCA":
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < max(self.n_components, 2):
            raise ValueError(f"need at least {max(self.n_components, 2)} rows to project")
        if self.n_components > x.shape[1]:
            raise ValueError("n_components exceeds the feature count")
        self.mean = x.mean(axis=0)
        centered = x - self.mean
        cov = centered.T @ centered / (x.shape[0] - 1)
        total = float(np.trace(cov))
        if total <= 0.0:
            raise ValueError("zero-variance data cannot be projected")

        rng = np.random.default_rng(self.seed)
        a = cov.copy()
        components, eigenvalues = [], []
        for _ in range(self.n_components):
            v = self._power_iteration(a, components, total, rng)
            v /= np.linalg.norm(v)
            if v[np.argmax(np.abs(v))] < 0:
                v = -v
            lam = max(float(v @ cov @ v), 0.0)
            components.append(v)
            eigenvalues.append(lam)
            a = a - lam * np.outer(v, v)

        self.components = np.array(components)
        self.explained_ratio = np.clip(np.array(eigenvalues) / total, 0.0, 1.0)
        logger.debug("PCA explained ratios: %s", np.round(self.explained_ratio, 4).tolist())
        return self

    def transform(self, x: np.ndarray) -> np.ndarray:
        if self.components is None or self.mean is None:
            raise NotFittedError("PowerIterationPCA has not been fitted")
        return (np.asarray(x, dtype=np.float64) - self.mean) @ self.components.T


def pca_project(x: np.ndarray, dims: int = 2) -> PcaProjection:
    """
    Project rows onto their top principal components

    Args:
        x: Matrix (n x d), n >= dims
        dims: 2 or 3

    Returns:
        PcaProjection with coordinates and explained variance ratios
    """
    if dims not in (2, 3):
        raise ValueError("dims must be 2 or 3")
    pca = PowerIterationPCA(n_components=dims).fit(x)
    return PcaProjection(
        coords=pca.transform(x),
        explained_ratio=pca.explained_ratio,
        components=pca.components,
        mean=pca.mean,
    )
