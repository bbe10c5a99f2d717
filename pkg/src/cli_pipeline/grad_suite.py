"""
Gradient Check Suite
Central-difference checks over every layer, loss and model path
"""

import logging
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..classifier_heads.mlp_heads import MlpHead
from ..classifier_heads.models import MlpHeadConfig
from ..cpac_head.cpac import CpacModel
from ..cpac_head.models import CpacConfig
from ..neural_core.functional import (
    bce_grad,
    bce_loss,
    focal_grad,
    focal_loss,
    kl_divergence,
    kl_grad,
    mse_grad,
    mse_loss,
    softmax,
)
from ..neural_core.grad_check import grad_check
from ..neural_core.layers import BatchNorm1d, Dense, Module, ReLU, Sigmoid
from ..neural_core.models import FocalConfig, GradCheckReport, LossMode
from ..vaegan_core.networks import Encoder, build_decoder, build_discriminator, reparameterize, reparameterize_backward

logger = logging.getLogger(__name__)

Probe = Callable[[np.random.Generator], GradCheckReport]


def _away_from_zero(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    return rng.choice([-1.0, 1.0], size=shape) * rng.uniform(0.1, 2.0, size=shape)


def _module_probe(name: str, module: Module, x: np.ndarray, rng: np.random.Generator) -> GradCheckReport:
    """Linear readout sum(r * module(x)) checked against every parameter and the input"""
    r = rng.normal(size=module.forward(x, train=True).shape)
    module.zero_grad()
    module.forward(x, train=True)
    dx = module.backward(r)
    targets = {p.name: (p.value, p.grad.copy()) for p in module.parameters()}
    targets["input"] = (x, dx)
    return grad_check(lambda: float(np.sum(r * module.forward(x, train=True))), targets, name=name)


def _head_probe(name: str, head, x: np.ndarray, y: np.ndarray) -> GradCheckReport:
    head.zero_grad()
    _, dx = head.loss_and_backward(x, y)
    targets = {p.name: (p.value, p.grad.copy()) for p in head.parameters()}
    targets["input"] = (x, dx)
    return grad_check(lambda: head.loss_and_backward(x, y)[0], targets, max_entries=40, name=name)


def probe_dense(rng):
    return _module_probe("dense", Dense(4, 3, rng, name="dense"), rng.normal(size=(5, 4)), rng)


def probe_relu(rng):
    return _module_probe("relu", ReLU(), _away_from_zero(rng, (5, 4)), rng)


def probe_sigmoid(rng):
    return _module_probe("sigmoid", Sigmoid(), rng.normal(size=(5, 4)), rng)


def probe_batchnorm(rng):
    bn = BatchNorm1d(3, name="bn")
    bn.gamma.value = rng.uniform(0.5, 1.5, size=3)
    bn.beta.value = rng.normal(size=3)
    return _module_probe("batchnorm", bn, rng.normal(size=(6, 3)), rng)


def probe_softmax(rng):
    x, r = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    s = softmax(x)
    dx = s * (r - np.sum(r * s, axis=1, keepdims=True))
    return grad_check(lambda: float(np.sum(r * softmax(x))), {"logits": (x, dx)}, name="softmax")


def probe_mse(rng):
    x, x_rec = rng.normal(size=(5, 4)), rng.normal(size=(5, 4))
    return grad_check(lambda: mse_loss(x, x_rec), {"x_rec": (x_rec, mse_grad(x, x_rec))}, name="mse")


def probe_bce(rng):
    y, p = rng.integers(0, 2, size=20).astype(float), rng.uniform(0.05, 0.95, size=20)
    return grad_check(lambda: bce_loss(y, p), {"y_hat": (p, bce_grad(y, p))}, name="bce")


def probe_focal(rng):
    cfg = FocalConfig()
    y, p = rng.integers(0, 2, size=20).astype(float), rng.uniform(0.05, 0.95, size=20)
    return grad_check(lambda: focal_loss(y, p, cfg), {"y_hat": (p, focal_grad(y, p, cfg))}, name="focal")


def probe_kl(rng):
    mu, logvar = rng.normal(size=(5, 2)), rng.normal(size=(5, 2))
    g_mu, g_lv = kl_grad(mu, logvar)
    return grad_check(lambda: kl_divergence(mu, logvar), {"mu": (mu, g_mu), "logvar": (logvar, g_lv)}, name="kl")


def probe_reparameterization(rng):
    mu, logvar, eps = rng.normal(size=(5, 2)), rng.normal(size=(5, 2)), rng.normal(size=(5, 2))
    r = rng.normal(size=(5, 2))
    d_mu, d_lv = reparameterize_backward(r, mu, reparameterize(mu, logvar, eps))
    return grad_check(
        lambda: float(np.sum(r * reparameterize(mu, logvar, eps))),
        {"mu": (mu, d_mu), "logvar": (logvar, d_lv)},
        name="reparameterization",
    )


def probe_encoder(rng):
    encoder = Encoder(6, [8, 4], 2, rng)
    x = rng.normal(size=(5, 6))
    r_mu, r_lv = rng.normal(size=(5, 2)), rng.normal(size=(5, 2))
    encoder.zero_grad()
    encoder.forward(x, train=True)
    dx = encoder.backward(r_mu, r_lv)
    targets = {p.name: (p.value, p.grad.copy()) for p in encoder.parameters()}
    targets["input"] = (x, dx)

    def loss_fn():
        mu, lv = encoder.forward(x, train=True)
        return float(np.sum(r_mu * mu) + np.sum(r_lv * lv))

    return grad_check(loss_fn, targets, name="encoder")


def probe_decoder(rng):
    return _module_probe("decoder", build_decoder(2, [4, 8], 6, rng), rng.normal(size=(5, 2)), rng)


def probe_discriminator(rng):
    return _module_probe("discriminator", build_discriminator(6, [8, 4], rng), rng.normal(size=(5, 6)), rng)


def _mlp_head_probe(variant: int) -> Probe:
    def probe(rng):
        head = MlpHead(MlpHeadConfig(variant=variant, loss_mode=LossMode.FOCAL, seed=int(rng.integers(1000))))
        head.set_reuse_mask(True)
        return _head_probe(f"mlp_head_{variant}", head, rng.normal(size=(8, 2)), np.array([0, 1] * 4))
    return probe


def _cpac_probe(name: str, **flags) -> Probe:
    def probe(rng):
        model = CpacModel(CpacConfig(input_dim=3, loss_mode=LossMode.FOCAL, seed=int(rng.integers(1000)), **flags))
        x, y = rng.normal(size=(8, 3)), np.array([0, 1] * 4)
        model.loss_and_backward(x, y)
        if model.config.use_prototypes:
            model.p0.value = model.p0.value + rng.normal(scale=0.5, size=3)
            model.p1.value = model.p1.value + rng.normal(scale=0.5, size=3)
        return _head_probe(name, model, x, y)
    return probe


PROBES: Dict[str, Probe] = {
    "dense": probe_dense,
    "relu": probe_relu,
    "sigmoid": probe_sigmoid,
    "batchnorm": probe_batchnorm,
    "softmax": probe_softmax,
    "mse": probe_mse,
    "bce": probe_bce,
    "focal": probe_focal,
    "kl": probe_kl,
    "reparameterization": probe_reparameterization,
    "encoder": probe_encoder,
    "decoder": probe_decoder,
    "discriminator": probe_discriminator,
    "mlp_head_1": _mlp_head_probe(1),
    "mlp_head_2": _mlp_head_probe(2),
    "mlp_head_3": _mlp_head_probe(3),
    "cpac": _cpac_probe("cpac"),
    "cpac_no_attention": _cpac_probe("cpac_no_attention", use_attention=False),
    "cpac_no_prototypes": _cpac_probe("cpac_no_prototypes", use_prototypes=False),
    "cpac_no_penalties": _cpac_probe("cpac_no_penalties", use_penalties=False),
}


def run_grad_suite(seed: int = 0, names: Optional[Iterable[str]] = None) -> List[GradCheckReport]:
    """
    Run the named probes (all by default), each with its own seeded generator

    Raises:
        KeyError: unknown probe name
    """
    selected = list(names) if names is not None else list(PROBES)
    unknown = [n for n in selected if n not in PROBES]
    if unknown:
        raise KeyError(f"unknown probes: {', '.join(unknown)}")
    reports = []
    for i, name in enumerate(selected):
        report = PROBES[name](np.random.default_rng(seed + i))
        report.name = name
        level = logging.INFO if report.passed else logging.ERROR
        logger.log(level, "grad-check %s: max rel error %.3e", name, report.max_rel_error)
        reports.append(report)
    return reports


def format_table(reports: List[GradCheckReport]) -> str:
    width = max([len(r.name) for r in reports] + [5])
    lines = [f"{'probe':<{width}}  {'max rel error':>13}  {'checked':>7}  status"]
    for r in reports:
        status = "ok" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {r.max_rel_error:>13.3e}  {r.n_checked:>7d}  {status}")
    return "\n".join(lines)
