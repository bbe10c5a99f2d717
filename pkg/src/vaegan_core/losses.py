"""
VAE-GAN Losses
Reconstruction-plus-KL objective and the two adversarial terms
"""

from typing import Tuple

import numpy as np

from ..neural_core.functional import clip_probs, kl_divergence, mse_loss
from ..neural_core.models import EPSILON
from .models import VaeLossBreakdown


def vae_loss(x: np.ndarray, x_rec: np.ndarray, mu: np.ndarray, logvar: np.ndarray, beta: float) -> VaeLossBreakdown:
    """MSE(x, x_rec) + beta * KL(mu, logvar) with both components"""
    recon = mse_loss(x, x_rec)
    kl = kl_divergence(mu, logvar)
    return VaeLossBreakdown(total=recon + beta * kl, recon=recon, kl=kl)


def discriminator_loss(real_probs: np.ndarray, fake_probs: np.ndarray) -> float:
    """-mean log D(x) - mean log(1 - D(x_rec))"""
    real = clip_probs(np.asarray(real_probs, dtype=np.float64))
    fake = clip_probs(np.asarray(fake_probs, dtype=np.float64))
    return float(-np.mean(np.log(real)) - np.mean(np.log(1.0 - fake)))


def discriminator_loss_grads(real_probs: np.ndarray, fake_probs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of discriminator_loss with respect to both probability vectors"""
    real = np.asarray(real_probs, dtype=np.float64)
    fake = np.asarray(fake_probs, dtype=np.float64)
    in_real = (real >= EPSILON) & (real <= 1.0 - EPSILON)
    in_fake = (fake >= EPSILON) & (fake <= 1.0 - EPSILON)
    d_real = -1.0 / clip_probs(real) / max(real.size, 1) * in_real
    d_fake = 1.0 / (1.0 - clip_probs(fake)) / max(fake.size, 1) * in_fake
    return d_real, d_fake


def generator_adv_loss(fake_probs: np.ndarray) -> float:
    """-mean log D(x_rec)"""
    fake = clip_probs(np.asarray(fake_probs, dtype=np.float64))
    return float(-np.mean(np.log(fake)))


def generator_adv_grad(fake_probs: np.ndarray) -> np.ndarray:
    fake = np.asarray(fake_probs, dtype=np.float64)
    inside = (fake >= EPSILON) & (fake <= 1.0 - EPSILON)
    return -1.0 / clip_probs(fake) / max(fake.size, 1) * inside
