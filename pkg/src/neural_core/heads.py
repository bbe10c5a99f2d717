"""
Head Protocol
Interface shared by every classification head that trains on latent codes
"""

from typing import Dict, List, Optional, Protocol, Tuple, runtime_checkable

import numpy as np

from .layers import Parameter
from .models import FocalConfig, LossMode


@runtime_checkable
class ClassificationHead(Protocol):
    """
    A binary classifier over latent vectors

    loss_and_backward returns the scalar loss together with dL/dz so the
    caller can push the gradient back into the encoder. Parameter gradients
    are accumulated as a side effect.
    """

    input_dim: int

    def parameters(self) -> List[Parameter]:
        ...

    def zero_grad(self) -> None:
        ...

    def predict_proba(self, z: np.ndarray) -> np.ndarray:
        ...

    def loss_and_backward(self, z: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
        ...

    def post_step(self) -> None:
        ...

    def set_loss(self, mode: LossMode, focal: Optional[FocalConfig] = None) -> None:
        ...

    def state_dict(self) -> Dict[str, np.ndarray]:
        ...

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        ...
