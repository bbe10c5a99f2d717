"""
Optimizer
Adaptive-moment updates with bias correction
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..common.errors import ShapeMismatchError
from .layers import Parameter
from .models import OptimizerConfig, OptimizerState


def adam_update(
    value: np.ndarray,
    grad: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    t: int,
    cfg: OptimizerConfig,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single bias-corrected update; t is the 1-based step count"""
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad
    m_hat = m / (1.0 - cfg.beta1 ** t)
    v_hat = v / (1.0 - cfg.beta2 ** t)
    return value - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon), m, v


def optimizer_step(
    state: OptimizerState, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]
) -> List[np.ndarray]:
    """
    Apply one update to a list of arrays

    Moments are created lazily on the first call and must mirror the
    parameter shapes afterwards.

    Returns:
        Updated arrays (inputs are not modified)
    """
    if len(params) != len(grads):
        raise ShapeMismatchError("params and grads differ in length")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ShapeMismatchError(f"parameter {p.shape} and gradient {g.shape} differ")
    if not state.first_moments:
        state.first_moments = [np.zeros_like(p, dtype=np.float64) for p in params]
        state.second_moments = [np.zeros_like(p, dtype=np.float64) for p in params]
    elif len(state.first_moments) != len(params) or any(
        m.shape != p.shape for m, p in zip(state.first_moments, params)
    ):
        raise ShapeMismatchError("optimizer moments do not mirror the parameters")

    state.step_count += 1
    updated = []
    for i, (p, g) in enumerate(zip(params, grads)):
        new, state.first_moments[i], state.second_moments[i] = adam_update(
            np.asarray(p, dtype=np.float64),
            np.asarray(g, dtype=np.float64),
            state.first_moments[i],
            state.second_moments[i],
            state.step_count,
            state.config,
        )
        updated.append(new)
    return updated


class Adam:
    """Optimizer bound to a fixed list of Parameters"""

    def __init__(self, params: Sequence[Parameter], config: Optional[OptimizerConfig] = None):
        self.params = list(params)
        self.state = OptimizerState(config=config or OptimizerConfig())

    @property
    def learning_rate(self) -> float:
        return self.state.config.learning_rate

    def step(self) -> None:
        new_values = optimizer_step(
            self.state, [p.value for p in self.params], [p.grad for p in self.params]
        )
        for p, value in zip(self.params, new_values):
            p.value = value

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()
