"""
Layers
Trainable building blocks with explicit forward and backward passes
"""

from typing import Dict, Iterable, List, Optional

import numpy as np

from ..common.errors import NotFittedError, ShapeMismatchError
from .functional import dropout, relu, relu_grad, sigmoid


class Parameter:
    """A trainable array together with its accumulated gradient"""

    def __init__(self, name: str, value: np.ndarray):
        self.name = name
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.value)

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.value.shape})"


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    """Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)), shaped (fan_out, fan_in)"""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


class Module:
    """
    Base class for layers

    forward caches what backward needs; backward accumulates into
    Parameter.grad and returns the gradient with respect to the input.
    """

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def parameters(self) -> List[Parameter]:
        return []

    def buffers(self) -> Dict[str, np.ndarray]:
        return {}

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def __call__(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        return self.forward(x, train=train)

    def state_dict(self, prefix: str = "") -> Dict[str, np.ndarray]:
        state = {f"{prefix}{p.name}": p.value.copy() for p in self.parameters()}
        state.update({f"{prefix}{k}": v.copy() for k, v in self.buffers().items()})
        return state

    def load_state_dict(self, state: Dict[str, np.ndarray], prefix: str = "") -> None:
        """Copy arrays into parameters and buffers, checking every shape"""
        for p in self.parameters():
            key = f"{prefix}{p.name}"
            if key not in state:
                raise KeyError(f"missing array {key!r}")
            value = np.asarray(state[key], dtype=np.float64)
            if value.shape != p.value.shape:
                raise ShapeMismatchError(f"{key}: expected {p.value.shape}, got {value.shape}")
            p.value = value.copy()
            p.zero_grad()
        self._load_buffers(state, prefix)

    def _load_buffers(self, state: Dict[str, np.ndarray], prefix: str) -> None:
        pass


class Dense(Module):
    """Affine layer y = x W^T + b with W shaped (out, in)"""

    def __init__(self, in_dim: int, out_dim: int, rng: Optional[np.random.Generator] = None, name: str = "dense"):
        if in_dim < 1 or out_dim < 1:
            raise ValueError("layer dimensions must be positive")
        rng = rng or np.random.default_rng(0)
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.weight = Parameter(f"{name}.weight", glorot_uniform(rng, in_dim, out_dim))
        self.bias = Parameter(f"{name}.bias", np.zeros(out_dim))
        self._x: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ShapeMismatchError(f"{self.weight.name}: expected (*, {self.in_dim}) input, got {x.shape}")
        self._x = x
        return x @ self.weight.value.T + self.bias.value

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if self._x is None:
            raise NotFittedError("backward called before forward")
        self.weight.grad += grad.T @ self._x
        self.bias.grad += grad.sum(axis=0)
        return grad @ self.weight.value

    def parameters(self) -> List[Parameter]:
        return [self.weight, self.bias]


class ReLU(Module):
    def __init__(self):
        self._x: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        self._x = x
        return relu(x)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad * relu_grad(self._x)


class Sigmoid(Module):
    def __init__(self):
        self._y: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        self._y = sigmoid(x)
        return self._y

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad * self._y * (1.0 - self._y)


class BatchNorm1d(Module):
    """
    Batch normalization over the batch axis

    Train mode normalizes with the biased batch variance and updates the
    running statistics with ``momentum``; infer mode uses the running ones.
    """

    def __init__(self, dim: int, momentum: float = 0.1, eps: float = 1e-5, name: str = "bn"):
        self.dim = dim
        self.momentum = momentum
        self.eps = eps
        self.name = name
        self.gamma = Parameter(f"{name}.gamma", np.ones(dim))
        self.beta = Parameter(f"{name}.beta", np.zeros(dim))
        self.running_mean = np.zeros(dim)
        self.running_var = np.ones(dim)
        self._cache = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ShapeMismatchError(f"{self.name}: expected (*, {self.dim}) input, got {x.shape}")
        if train:
            if x.shape[0] < 2:
                raise ValueError("batch normalization needs at least 2 rows in train mode")
            mean = x.mean(axis=0)
            var = x.var(axis=0)
            self.running_mean = (1.0 - self.momentum) * self.running_mean + self.momentum * mean
            self.running_var = (1.0 - self.momentum) * self.running_var + self.momentum * var
        else:
            mean, var = self.running_mean, self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        x_hat = (x - mean) * inv_std
        self._cache = (x_hat, inv_std, train)
        return self.gamma.value * x_hat + self.beta.value

    def backward(self, grad: np.ndarray) -> np.ndarray:
        x_hat, inv_std, train = self._cache
        self.gamma.grad += np.sum(grad * x_hat, axis=0)
        self.beta.grad += np.sum(grad, axis=0)
        g_hat = grad * self.gamma.value
        if not train:
            return g_hat * inv_std
        n = grad.shape[0]
        return (inv_std / n) * (
            n * g_hat - g_hat.sum(axis=0) - x_hat * np.sum(g_hat * x_hat, axis=0)
        )

    def parameters(self) -> List[Parameter]:
        return [self.gamma, self.beta]

    def buffers(self) -> Dict[str, np.ndarray]:
        return {f"{self.name}.running_mean": self.running_mean, f"{self.name}.running_var": self.running_var}

    def _load_buffers(self, state: Dict[str, np.ndarray], prefix: str) -> None:
        for attr in ("running_mean", "running_var"):
            key = f"{prefix}{self.name}.{attr}"
            if key in state:
                setattr(self, attr, np.asarray(state[key], dtype=np.float64).copy())


class Dropout(Module):
    """Inverted dropout; ``reuse_mask`` freezes the last mask for gradient checks"""

    def __init__(self, p: float = 0.2, rng: Optional[np.random.Generator] = None):
        if not 0.0 <= p < 1.0:
            raise ValueError("dropout probability must lie in [0, 1)")
        self.p = p
        self.rng = rng or np.random.default_rng(0)
        self.reuse_mask = False
        self._mask: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        if train and self.reuse_mask and self._mask is not None and self._mask.shape == x.shape:
            return x * self._mask
        out, self._mask = dropout(x, self.p, train, self.rng)
        return out

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad if self._mask is None else grad * self._mask


class Sequential(Module):
    def __init__(self, layers: Iterable[Module]):
        self.layers = list(layers)

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, train=train)
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def parameters(self) -> List[Parameter]:
        return [p for layer in self.layers for p in layer.parameters()]

    def buffers(self) -> Dict[str, np.ndarray]:
        out: Dict[str, np.ndarray] = {}
        for layer in self.layers:
            out.update(layer.buffers())
        return out

    def _load_buffers(self, state: Dict[str, np.ndarray], prefix: str) -> None:
        for layer in self.layers:
            layer._load_buffers(state, prefix)

    def set_reuse_mask(self, flag: bool) -> None:
        for layer in self.layers:
            if isinstance(layer, Dropout):
                layer.reuse_mask = flag


def mlp(dims: List[int], rng: np.random.Generator, name: str, final_activation: Optional[Module] = None) -> Sequential:
    """Dense layers with ReLU between them; dims = [in, hidden..., out]"""
    layers: List[Module] = []
    for i, (a, b) in enumerate(zip(dims[:-1], dims[1:])):
        layers.append(Dense(a, b, rng, name=f"{name}.{i}"))
        if i < len(dims) - 2:
            layers.append(ReLU())
    if final_activation is not None:
        layers.append(final_activation)
    return Sequential(layers)


def linear_forward(layer: Dense, x: np.ndarray) -> np.ndarray:
    return layer.forward(x)


def batchnorm_forward(layer: BatchNorm1d, x: np.ndarray, train: bool) -> np.ndarray:
    return layer.forward(x, train=train)
