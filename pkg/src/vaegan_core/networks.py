"""
VAE-GAN Networks
Encoder with a (mu, logvar) head, decoder, discriminator and the reparameterization path
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..neural_core.layers import Dense, Module, Parameter, ReLU, Sequential, Sigmoid, mlp


class Encoder(Module):
    """
    Dense+ReLU trunk followed by one Dense layer emitting mu || logvar

    logvar is clamped to [-clip, clip]; the clamp passes no gradient.
    """

    def __init__(self, input_dim: int, hidden: Sequence[int], latent_dim: int,
                 rng: np.random.Generator, logvar_clip: float = 10.0):
        layers: List[Module] = []
        dims = [input_dim] + list(hidden)
        for i, (a, b) in enumerate(zip(dims[:-1], dims[1:])):
            layers += [Dense(a, b, rng, name=f"encoder.{i}"), ReLU()]
        self.trunk = Sequential(layers)
        self.head = Dense(dims[-1], 2 * latent_dim, rng, name="encoder.head")
        self.latent_dim = latent_dim
        self.input_dim = input_dim
        self.logvar_clip = logvar_clip
        self._raw_logvar = None

    def forward(self, x: np.ndarray, train: bool = False) -> Tuple[np.ndarray, np.ndarray]:  # type: ignore[override]
        out = self.head.forward(self.trunk.forward(x, train=train), train=train)
        mu, raw = out[:, : self.latent_dim], out[:, self.latent_dim:]
        self._raw_logvar = raw
        return mu, np.clip(raw, -self.logvar_clip, self.logvar_clip)

    def backward(self, d_mu: np.ndarray, d_logvar: np.ndarray) -> np.ndarray:  # type: ignore[override]
        inside = np.abs(self._raw_logvar) <= self.logvar_clip
        grad = np.concatenate([d_mu, d_logvar * inside], axis=1)
        return self.trunk.backward(self.head.backward(grad))

    def parameters(self) -> List[Parameter]:
        return self.trunk.parameters() + self.head.parameters()


def build_decoder(latent_dim: int, hidden: Sequence[int], output_dim: int, rng: np.random.Generator) -> Sequential:
    """Dense+ReLU stack with an unconstrained linear output"""
    return mlp([latent_dim] + list(hidden) + [output_dim], rng, name="decoder")


def build_discriminator(input_dim: int, hidden: Sequence[int], rng: np.random.Generator) -> Sequential:
    return mlp([input_dim] + list(hidden) + [1], rng, name="discriminator", final_activation=Sigmoid())


def reparameterize(mu: np.ndarray, logvar: np.ndarray, eps: np.ndarray) -> np.ndarray:
    return mu + np.exp(0.5 * logvar) * eps


def reparameterize_backward(dz: np.ndarray, mu: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(dL/dmu, dL/dlogvar) given dL/dz; dz/dlogvar = (z - mu) / 2"""
    return dz, 0.5 * dz * (z - mu)


def flat_parameters(modules: Dict[str, Module]) -> List[Parameter]:
    return [p for m in modules.values() for p in m.parameters()]
