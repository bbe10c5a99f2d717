"""
MLP Heads
Small sigmoid classifiers over latent codes
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..common.errors import ShapeMismatchError
from ..neural_core.checkpoint import load_checkpoint, save_checkpoint
from ..neural_core.functional import bce_grad, bce_loss, focal_grad, focal_loss
from ..neural_core.layers import BatchNorm1d, Dense, Dropout, Module, Parameter, ReLU, Sequential, Sigmoid
from ..neural_core.models import FocalConfig, LossMode
from .models import MlpHeadConfig

logger = logging.getLogger(__name__)

CHECKPOINT_KIND = "mlp_head"


def build_head_network(config: MlpHeadConfig) -> Sequential:
    rng = np.random.default_rng(config.seed)
    d = config.input_dim
    layers: List[Module]
    if config.variant == 1:
        layers = [Dense(d, 32, rng, name="mlp.0"), ReLU(), Dense(32, 1, rng, name="mlp.1")]
    elif config.variant == 2:
        layers = [
            Dense(d, 64, rng, name="mlp.0"), BatchNorm1d(64, name="mlp.bn"), ReLU(),
            Dropout(config.dropout, np.random.default_rng(config.seed + 1)), Dense(64, 1, rng, name="mlp.1"),
        ]
    else:
        layers = [
            Dense(d, 128, rng, name="mlp.0"), ReLU(), Dense(128, 64, rng, name="mlp.1"), ReLU(),
            Dense(64, 1, rng, name="mlp.2"),
        ]
    return Sequential(layers + [Sigmoid()])


class MlpHead:
    """Classification head with the variant's layer stack and a sigmoid output"""

    def __init__(self, config: Optional[MlpHeadConfig] = None):
        self.config = config or MlpHeadConfig()
        self.input_dim = self.config.input_dim
        self.network = build_head_network(self.config)

    def _check(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 2 or z.shape[1] != self.input_dim:
            raise ShapeMismatchError(f"head expects (*, {self.input_dim}) input, got {z.shape}")
        return z

    def parameters(self) -> List[Parameter]:
        return self.network.parameters()

    def zero_grad(self) -> None:
        self.network.zero_grad()

    def post_step(self) -> None:
        pass

    def set_loss(self, mode: LossMode, focal: Optional[FocalConfig] = None) -> None:
        update = {"loss_mode": LossMode(mode)}
        if focal is not None:
            update["focal"] = focal
        self.config = self.config.copy(update=update)

    def forward(self, z: np.ndarray, train: bool = False) -> np.ndarray:
        return self.network.forward(self._check(z), train=train).ravel()

    def predict_proba(self, z: np.ndarray) -> np.ndarray:
        return self.forward(z, train=False)

    def loss_and_backward(self, z: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
        """
        Loss on a batch; parameter gradients accumulate and dL/dz is returned

        A single-row batch runs in infer mode since batch statistics need two rows.
        """
        z = self._check(z)
        y = np.asarray(y, dtype=np.float64).ravel()
        prob = self.forward(z, train=z.shape[0] >= 2)
        if self.config.loss_mode == LossMode.FOCAL:
            loss, g = focal_loss(y, prob, self.config.focal), focal_grad(y, prob, self.config.focal)
        else:
            loss, g = bce_loss(y, prob), bce_grad(y, prob)
        return loss, self.network.backward(g[:, None])

    def state_dict(self) -> Dict[str, np.ndarray]:
        return self.network.state_dict()

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        self.network.load_state_dict(state)

    def set_reuse_mask(self, flag: bool) -> None:
        self.network.set_reuse_mask(flag)

    def save(self, path: Union[str, Path], metadata: Optional[dict] = None) -> Path:
        return save_checkpoint(path, CHECKPOINT_KIND, self.state_dict(), self.config.dict(), metadata)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "MlpHead":
        doc = load_checkpoint(path, expected_kind=CHECKPOINT_KIND)
        head = cls(MlpHeadConfig.parse_obj(doc.config))
        head.load_state_dict(doc.array_dict())
        return head


def mlp_forward(head: MlpHead, z: np.ndarray, train: bool = False) -> np.ndarray:
    return head.forward(z, train=train)
