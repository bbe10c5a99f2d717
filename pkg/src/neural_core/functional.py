"""
Functional Primitives
Activations and losses with their analytic gradients
"""

from typing import Optional, Tuple

import numpy as np

from ..common.errors import ShapeMismatchError, TrainingDivergedError
from .models import EPSILON, FocalConfig


def _same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{what}: shapes {a.shape} and {b.shape} differ")


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_grad(x: np.ndarray) -> np.ndarray:
    """Derivative of relu at the pre-activation x (0 at the kink)"""
    return (x > 0).astype(np.float64)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Saturating logistic function, stable for large |x|"""
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax"""
    z = np.asarray(logits, dtype=np.float64)
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def clip_probs(p: np.ndarray, eps: float = EPSILON) -> np.ndarray:
    return np.clip(p, eps, 1.0 - eps)


def _clip_mask(p: np.ndarray, eps: float = EPSILON) -> np.ndarray:
    return ((p >= eps) & (p <= 1.0 - eps)).astype(np.float64)


def mse_loss(x: np.ndarray, x_rec: np.ndarray) -> float:
    """Mean squared error over every element"""
    _same_shape(x, x_rec, "mse_loss")
    if x.size == 0:
        return 0.0
    return float(np.mean((x_rec - x) ** 2))


def mse_grad(x: np.ndarray, x_rec: np.ndarray) -> np.ndarray:
    """dMSE/dx_rec"""
    _same_shape(x, x_rec, "mse_grad")
    return 2.0 * (x_rec - x) / max(x.size, 1)


def bce_loss(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Binary cross-entropy averaged over the batch"""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    _same_shape(y, y_hat, "bce_loss")
    if y.size == 0:
        return 0.0
    p = clip_probs(y_hat)
    return float(np.mean(-y * np.log(p) - (1.0 - y) * np.log(1.0 - p)))


def bce_grad(y: np.ndarray, y_hat: np.ndarray) -> np.ndarray:
    """dBCE/dy_hat (zero where the clip is active)"""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    _same_shape(y, y_hat, "bce_grad")
    p = clip_probs(y_hat)
    grad = (-y / p + (1.0 - y) / (1.0 - p)) / max(y.size, 1)
    return grad * _clip_mask(y_hat)


def focal_loss(y: np.ndarray, y_hat: np.ndarray, cfg: Optional[FocalConfig] = None) -> float:
    """Focal loss averaged over the batch"""
    cfg = cfg or FocalConfig()
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    _same_shape(y, y_hat, "focal_loss")
    if y.size == 0:
        return 0.0
    p = clip_probs(y_hat)
    a, g = cfg.alpha_fl, cfg.gamma
    pos = -a * (1.0 - p) ** g * y * np.log(p)
    neg = -(1.0 - a) * p ** g * (1.0 - y) * np.log(1.0 - p)
    return float(np.mean(pos + neg))


def focal_grad(y: np.ndarray, y_hat: np.ndarray, cfg: Optional[FocalConfig] = None) -> np.ndarray:
    """dFocal/dy_hat (zero where the clip is active)"""
    cfg = cfg or FocalConfig()
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    _same_shape(y, y_hat, "focal_grad")
    p = clip_probs(y_hat)
    a, g = cfg.alpha_fl, cfg.gamma
    d_pos = a * y * (g * (1.0 - p) ** (g - 1.0) * np.log(p) - (1.0 - p) ** g / p) if g > 0 else -a * y / p
    d_neg = -(1.0 - a) * (1.0 - y) * (g * p ** (g - 1.0) * np.log(1.0 - p) - p ** g / (1.0 - p)) if g > 0 \
        else (1.0 - a) * (1.0 - y) / (1.0 - p)
    return (d_pos + d_neg) / max(y.size, 1) * _clip_mask(y_hat)


def kl_divergence(mu: np.ndarray, logvar: np.ndarray) -> float:
    """KL(N(mu, exp(logvar)) || N(0, I)) summed over latent dims, averaged over the batch"""
    _same_shape(mu, logvar, "kl_divergence")
    if mu.shape[0] == 0:
        return 0.0
    per_row = 0.5 * np.sum(mu ** 2 + np.exp(logvar) - logvar - 1.0, axis=1)
    return float(np.mean(per_row))


def kl_grad(mu: np.ndarray, logvar: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of kl_divergence with respect to mu and logvar"""
    _same_shape(mu, logvar, "kl_grad")
    n = max(mu.shape[0], 1)
    return mu / n, 0.5 * (np.exp(logvar) - 1.0) / n


def dropout(
    x: np.ndarray, p: float, train: bool, rng: Optional[np.random.Generator] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Inverted dropout

    Args:
        x: Input
        p: Drop probability in [0, 1)
        train: Apply the mask only in train mode
        rng: Generator for the mask

    Returns:
        (output, scaled mask); the mask is all ones in infer mode or when p == 0
    """
    if not 0.0 <= p < 1.0:
        raise ValueError("dropout probability must lie in [0, 1)")
    if not train or p == 0.0:
        return x, np.ones_like(x)
    rng = rng or np.random.default_rng()
    mask = (rng.random(x.shape) >= p).astype(np.float64) / (1.0 - p)
    return x * mask, mask


def ensure_finite(x: np.ndarray, what: str) -> np.ndarray:
    """NaN/inf hook run after forward and backward passes"""
    if not np.all(np.isfinite(x)):
        raise TrainingDivergedError(f"{what} contains non-finite values")
    return x
