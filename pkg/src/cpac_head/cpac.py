"""
CPAC
Prototype classifier over attention-weighted squared distances
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..common.errors import ShapeMismatchError
from ..neural_core.checkpoint import load_checkpoint, save_checkpoint
from ..neural_core.functional import bce_grad, bce_loss, focal_grad, focal_loss, sigmoid
from ..neural_core.layers import Dense, Parameter, ReLU, Sequential, Sigmoid
from ..neural_core.models import FocalConfig, LossMode
from .models import CpacConfig, CpacExplanation, CpacLossBreakdown

logger = logging.getLogger(__name__)

CHECKPOINT_KIND = "cpac"
ALPHA_FLOOR = 1e-6


def weighted_distance(x: np.ndarray, prototype: np.ndarray, w: np.ndarray, alpha: float) -> np.ndarray:
    """alpha * sum_i w_i (x_i - p_i)^2 along the last axis"""
    x, prototype, w = (np.asarray(a, dtype=np.float64) for a in (x, prototype, w))
    if x.shape[-1] != prototype.shape[-1] or w.shape != x.shape:
        raise ShapeMismatchError("weighted_distance: dimensions differ")
    return alpha * np.sum(w * (x - prototype) ** 2, axis=-1)


class CpacModel:
    """
    Two learnable prototypes compared under a per-feature attention mask

    The fraud probability is softmax(-d0, -d1)[1] = sigmoid(d0 - d1) with
    d_c = alpha * sum_i w_i (x_i - p_c,i)^2 and w = sigmoid(W2 relu(W1 x + b1) + b2).
    Implements the classification-head interface used by joint training.
    """

    def __init__(self, config: Optional[CpacConfig] = None):
        self.config = config or CpacConfig()
        cfg = self.config
        d, h = cfg.input_dim, cfg.attention_width
        rng = np.random.default_rng(cfg.seed)
        self.input_dim = d
        self.attention_net = Sequential([
            Dense(d, h, rng, name="attention.0"), ReLU(), Dense(h, d, rng, name="attention.1"), Sigmoid(),
        ])
        self.p0 = Parameter("prototype0", np.zeros(d))
        self.p1 = Parameter("prototype1", np.zeros(d))
        self.alpha = Parameter("alpha", np.full(1, cfg.alpha_init))
        self.readout = Parameter("readout.weight", np.zeros(d))
        self.readout_bias = Parameter("readout.bias", np.zeros(1))
        self.init_rng = np.random.default_rng(cfg.seed + 1)
        self.prototypes_initialized = False
        self.loss_mode = cfg.loss_mode
        self.focal = cfg.focal

    # -------------------------------------------------------------- settings

    @property
    def lambda_scale(self) -> float:
        cfg = self.config
        return cfg.lambda_scale if cfg.use_penalties and cfg.use_prototypes else 0.0

    @property
    def lambda_anchor(self) -> float:
        cfg = self.config
        return cfg.lambda_anchor if cfg.use_penalties and cfg.use_prototypes else 0.0

    def set_loss(self, mode: LossMode, focal: Optional[FocalConfig] = None) -> None:
        self.loss_mode = LossMode(mode)
        if focal is not None:
            self.focal = focal
        self.config = self.config.copy(update={"loss_mode": self.loss_mode, "focal": self.focal})

    def parameters(self) -> List[Parameter]:
        params = self.attention_net.parameters() if self.config.use_attention else []
        if self.config.use_prototypes:
            return params + [self.p0, self.p1, self.alpha]
        return params + [self.readout, self.readout_bias]

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def post_step(self) -> None:
        """Keep alpha strictly positive"""
        self.alpha.value = np.maximum(self.alpha.value, ALPHA_FLOOR)

    def init_prototypes(self, x: np.ndarray, y: np.ndarray) -> None:
        """Class means of the given rows; a missing class gets small uniform noise"""
        for c, proto in ((0, self.p0), (1, self.p1)):
            rows = x[y == c]
            if rows.shape[0]:
                proto.value = rows.mean(axis=0)
            else:
                proto.value = self.init_rng.uniform(-0.1, 0.1, size=self.input_dim)
        self.prototypes_initialized = True

    # --------------------------------------------------------------- forward

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ShapeMismatchError(f"CPAC expects (*, {self.input_dim}) input, got {x.shape}")
        return x

    def attention(self, x: np.ndarray) -> np.ndarray:
        x = self._check(x)
        if not self.config.use_attention:
            return np.ones_like(x)
        return self.attention_net.forward(x)

    def distances(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(w, d0, d1) for a batch"""
        w = self.attention(x)
        a = float(self.alpha.value[0])
        return w, weighted_distance(x, self.p0.value, w, a), weighted_distance(x, self.p1.value, w, a)

    def _logits(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.config.use_prototypes:
            w, d0, d1 = self.distances(x)
            return w, d0 - d1
        w = self.attention(x)
        return w, (w * x) @ self.readout.value + self.readout_bias.value[0]

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self._logits(x)[1])

    # ------------------------------------------------------------- penalties

    def scale_penalty(self) -> float:
        return float(self.lambda_scale * np.sum(self.alpha.value ** 2))

    def anchor_terms(self, x: np.ndarray, y: np.ndarray) -> Tuple[float, Dict[int, np.ndarray], np.ndarray]:
        """
        Anchor penalty with its gradients

        Returns:
            (penalty, {class: dL/dp_c}, dL/dx); classes absent from the batch are skipped
        """
        lam = self.lambda_anchor
        dx = np.zeros_like(x)
        grads: Dict[int, np.ndarray] = {}
        total = 0.0
        for c, proto in ((0, self.p0), (1, self.p1)):
            mask = y == c
            n_c = int(mask.sum())
            if n_c == 0:
                continue
            diff = proto.value - x[mask].mean(axis=0)
            total += lam * float(np.sum(diff ** 2))
            grads[c] = 2.0 * lam * diff
            dx[mask] -= 2.0 * lam * diff / n_c
        return total, grads, dx

    def anchor_penalty(self, x: np.ndarray, y: np.ndarray) -> float:
        return self.anchor_terms(self._check(x), np.asarray(y).ravel())[0]

    # ------------------------------------------------------------------ loss

    def _classification(self, y: np.ndarray, prob: np.ndarray) -> Tuple[float, np.ndarray]:
        if self.loss_mode == LossMode.FOCAL:
            return focal_loss(y, prob, self.focal), focal_grad(y, prob, self.focal)
        return bce_loss(y, prob), bce_grad(y, prob)

    def total_loss(self, x: np.ndarray, y: np.ndarray) -> CpacLossBreakdown:
        x = self._check(x)
        y = np.asarray(y, dtype=np.float64).ravel()
        cls, _ = self._classification(y, self.predict_proba(x))
        scale = self.scale_penalty()
        anchor = self.anchor_terms(x, y)[0]
        return CpacLossBreakdown(total=cls + scale + anchor, classification=cls, scale=scale, anchor=anchor)

    def loss_and_backward(self, z: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
        """
        Total loss on a batch; accumulates parameter gradients and returns dL/dz

        Prototypes are initialized from this batch on the first call.
        """
        x = self._check(z)
        y = np.asarray(y, dtype=np.float64).ravel()
        if x.shape[0] != y.size:
            raise ShapeMismatchError("rows and labels differ in length")
        if not self.prototypes_initialized and self.config.use_prototypes:
            self.init_prototypes(x, y)

        w, logit = self._logits(x)
        prob = sigmoid(logit)
        cls, g = self._classification(y, prob)
        d_logit = g * prob * (1.0 - prob)
        dx = np.zeros_like(x)
        dw = np.zeros_like(x)

        if self.config.use_prototypes:
            a = float(self.alpha.value[0])
            for sign, proto in ((1.0, self.p0), (-1.0, self.p1)):
                g_c = sign * d_logit[:, None]
                r = x - proto.value
                self.alpha.grad += np.sum(g_c * w * r ** 2)
                dw += g_c * a * r ** 2
                dr = g_c * 2.0 * a * w * r
                dx += dr
                proto.grad -= dr.sum(axis=0)
        else:
            v = self.readout.value
            self.readout.grad += np.sum(d_logit[:, None] * w * x, axis=0)
            self.readout_bias.grad += d_logit.sum()
            dw += d_logit[:, None] * v * x
            dx += d_logit[:, None] * v * w

        if self.config.use_attention:
            dx += self.attention_net.backward(dw)

        scale = self.scale_penalty()
        self.alpha.grad += 2.0 * self.lambda_scale * self.alpha.value
        anchor, proto_grads, dx_anchor = self.anchor_terms(x, y)
        for c, grad in proto_grads.items():
            (self.p0 if c == 0 else self.p1).grad += grad
        dx += dx_anchor
        return cls + scale + anchor, dx

    # ------------------------------------------------------------ transparency

    def explain(self, row: np.ndarray) -> CpacExplanation:
        """Attention mask, distances and probability for a single row"""
        x = self._check(np.asarray(row, dtype=np.float64).reshape(1, -1))
        w, logit = self._logits(x)
        prob = float(sigmoid(logit)[0])
        if not self.config.use_prototypes:
            return CpacExplanation(attention=w[0].tolist(), prob=prob)
        a = float(self.alpha.value[0])
        c0 = a * w[0] * (x[0] - self.p0.value) ** 2
        c1 = a * w[0] * (x[0] - self.p1.value) ** 2
        return CpacExplanation(
            attention=w[0].tolist(),
            d0=float(c0.sum()),
            d1=float(c1.sum()),
            prob=prob,
            contributions0=c0.tolist(),
            contributions1=c1.tolist(),
        )

    # ------------------------------------------------------------ persistence

    def _all_parameters(self) -> List[Parameter]:
        return self.attention_net.parameters() + [self.p0, self.p1, self.alpha, self.readout, self.readout_bias]

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {p.name: p.value.copy() for p in self._all_parameters()}

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        for p in self._all_parameters():
            if p.name not in state:
                raise KeyError(f"missing array {p.name!r}")
            value = np.asarray(state[p.name], dtype=np.float64)
            if value.shape != p.value.shape:
                raise ShapeMismatchError(f"{p.name}: expected {p.value.shape}, got {value.shape}")
            p.value = value.copy()
            p.zero_grad()
        self.prototypes_initialized = True

    def save(self, path: Union[str, Path], metadata: Optional[dict] = None) -> Path:
        meta = {"loss_mode": self.loss_mode.value, "focal": self.focal.dict()}
        meta.update(metadata or {})
        return save_checkpoint(path, CHECKPOINT_KIND, self.state_dict(), self.config.dict(), meta)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CpacModel":
        doc = load_checkpoint(path, expected_kind=CHECKPOINT_KIND)
        model = cls(CpacConfig.parse_obj(doc.config))
        model.load_state_dict(doc.array_dict())
        if "loss_mode" in doc.metadata:
            model.set_loss(doc.metadata["loss_mode"], FocalConfig.parse_obj(doc.metadata.get("focal", {})))
        return model


def attention(model: CpacModel, x: np.ndarray) -> np.ndarray:
    return model.attention(x)


def predict(model: CpacModel, x: np.ndarray) -> np.ndarray:
    return model.predict_proba(x)


def scale_penalty(model: CpacModel) -> float:
    return model.scale_penalty()


def anchor_penalty(model: CpacModel, x: np.ndarray, y: np.ndarray) -> float:
    return model.anchor_penalty(x, y)


def cpac_total_loss(model: CpacModel, x: np.ndarray, y: np.ndarray, mode: Optional[LossMode] = None) -> float:
    """Classification loss plus both penalties; ``mode`` overrides the model's loss mode"""
    if mode is not None:
        previous = model.loss_mode
        model.set_loss(mode)
        try:
            return model.total_loss(x, y).total
        finally:
            model.set_loss(previous)
    return model.total_loss(x, y).total


def explain(model: CpacModel, row: np.ndarray) -> CpacExplanation:
    return model.explain(row)
