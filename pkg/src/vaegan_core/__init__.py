"""
VAE-GAN Core Module - LatentGuard v1.0
Encoder/decoder/discriminator oversampler and latent-space joint training
"""

from .losses import discriminator_loss, generator_adv_loss, vae_loss
from .models import EncoderOutput, EpochLog, GenerativeScope, TrainingLog, VaeGanConfig, VaeLossBreakdown
from .networks import Encoder, reparameterize, reparameterize_backward
from .trainer import VaeGanTrainer, train_joint, train_minority_oversampler
from .vaegan_model import VaeGanModel, decode, discriminate, encode, sample_frauds

__all__ = [
    "discriminator_loss", "generator_adv_loss", "vae_loss",
    "EncoderOutput", "EpochLog", "GenerativeScope", "TrainingLog", "VaeGanConfig", "VaeLossBreakdown",
    "Encoder", "reparameterize", "reparameterize_backward",
    "VaeGanTrainer", "train_joint", "train_minority_oversampler",
    "VaeGanModel", "decode", "discriminate", "encode", "sample_frauds",
]

__version__ = "1.0.0"
