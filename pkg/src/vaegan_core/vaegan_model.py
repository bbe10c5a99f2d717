"""
VAE-GAN Model
Encoder, decoder and discriminator bundled with their noise stream and checkpointing
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from ..common.errors import NotFittedError, ShapeMismatchError
from ..neural_core.checkpoint import load_checkpoint, save_checkpoint
from ..neural_core.layers import Parameter
from .models import EncoderOutput, TrainingLog, VaeGanConfig
from .networks import Encoder, build_decoder, build_discriminator, reparameterize

logger = logging.getLogger(__name__)

CHECKPOINT_KIND = "vaegan"


class VaeGanModel:
    """
    Encoder E, decoder D and discriminator C

    Weights are initialized from ``config.seed``; encoding noise comes from a
    separate stream seeded with ``config.seed + 1`` so that repeated runs
    with the same seed draw identical eps.
    """

    def __init__(self, config: Optional[VaeGanConfig] = None):
        self.config = config or VaeGanConfig()
        cfg = self.config
        init_rng = np.random.default_rng(cfg.seed)
        self.encoder = Encoder(cfg.input_dim, cfg.encoder_hidden, cfg.latent_dim, init_rng, cfg.logvar_clip)
        self.decoder = build_decoder(cfg.latent_dim, cfg.decoder_hidden, cfg.input_dim, init_rng)
        self.discriminator = build_discriminator(cfg.input_dim, cfg.discriminator_hidden, init_rng)
        self.noise_rng = np.random.default_rng(cfg.seed + 1)
        self.training_log = TrainingLog()
        self.trained = False

    @property
    def latent_dim(self) -> int:
        return self.config.latent_dim

    def generator_parameters(self) -> List[Parameter]:
        return self.encoder.parameters() + self.decoder.parameters()

    def discriminator_parameters(self) -> List[Parameter]:
        return self.discriminator.parameters()

    def _check_input(self, x: np.ndarray, width: int, what: str) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != width:
            raise ShapeMismatchError(f"{what}: expected (*, {width}) input, got {x.shape}")
        return x

    def encode(self, x: np.ndarray, eps: Optional[np.ndarray] = None, train: bool = False) -> EncoderOutput:
        """mu, logvar and z; eps is drawn from the noise stream unless given"""
        x = self._check_input(x, self.config.input_dim, "encode")
        mu, logvar = self.encoder.forward(x, train=train)
        if eps is None:
            eps = self.noise_rng.standard_normal(mu.shape)
        eps = np.asarray(eps, dtype=np.float64)
        if eps.shape != mu.shape:
            raise ShapeMismatchError(f"eps shape {eps.shape} does not match {mu.shape}")
        return EncoderOutput(mu=mu, logvar=logvar, eps=eps, z=reparameterize(mu, logvar, eps))

    def encode_mean(self, x: np.ndarray) -> np.ndarray:
        """Deterministic latent code (mu) without touching the noise stream"""
        x = self._check_input(x, self.config.input_dim, "encode")
        return self.encoder.forward(x)[0]

    def decode(self, z: np.ndarray, train: bool = False) -> np.ndarray:
        z = self._check_input(z, self.config.latent_dim, "decode")
        return self.decoder.forward(z, train=train)

    def discriminate(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        x = self._check_input(x, self.config.input_dim, "discriminate")
        return self.discriminator.forward(x, train=train).ravel()

    def sample_frauds(self, n: int, seed: int = 0) -> np.ndarray:
        """Decode n draws from N(0, I)"""
        if not self.trained:
            raise NotFittedError("VaeGanModel has not been trained")
        if n < 0:
            raise ValueError("n must be non-negative")
        z = np.random.default_rng(seed).standard_normal((n, self.config.latent_dim))
        return self.decoder.forward(z)

    def state_dict(self) -> Dict[str, np.ndarray]:
        state = {}
        for module in (self.encoder, self.decoder, self.discriminator):
            state.update(module.state_dict())
        return state

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        for module in (self.encoder, self.decoder, self.discriminator):
            module.load_state_dict(state)

    def save(self, path: Union[str, Path], metadata: Optional[dict] = None) -> Path:
        meta = {"trained": self.trained, "training_log": self.training_log.dict()}
        meta.update(metadata or {})
        return save_checkpoint(path, CHECKPOINT_KIND, self.state_dict(), self.config.dict(), meta)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "VaeGanModel":
        doc = load_checkpoint(path, expected_kind=CHECKPOINT_KIND)
        model = cls(VaeGanConfig.parse_obj(doc.config))
        model.load_state_dict(doc.array_dict())
        model.trained = bool(doc.metadata.get("trained", True))
        if "training_log" in doc.metadata:
            model.training_log = TrainingLog.parse_obj(doc.metadata["training_log"])
        return model


def encode(model: VaeGanModel, x: np.ndarray) -> EncoderOutput:
    return model.encode(x)


def decode(model: VaeGanModel, z: np.ndarray) -> np.ndarray:
    return model.decode(z)


def discriminate(model: VaeGanModel, x: np.ndarray) -> np.ndarray:
    return model.discriminate(x)


def sample_frauds(model: VaeGanModel, n: int, seed: int = 0) -> np.ndarray:
    return model.sample_frauds(n, seed)
