"""
VAE-GAN Trainer
Minority-only oversampler training and joint training with a classification head
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..common.errors import ShapeMismatchError, SingleClassError, TrainingDivergedError
from ..eval_metrics.metrics import confusion, prf, silhouette
from ..neural_core.functional import kl_grad, mse_grad, mse_loss
from ..neural_core.heads import ClassificationHead
from ..neural_core.models import OptimizerConfig
from ..neural_core.optimizer import Adam
from .losses import (
    discriminator_loss,
    discriminator_loss_grads,
    generator_adv_grad,
    generator_adv_loss,
    vae_loss,
)
from .models import EpochLog, GenerativeScope, TrainingLog
from .networks import reparameterize_backward
from .vaegan_model import VaeGanModel

logger = logging.getLogger(__name__)


class VaeGanTrainer:
    """
    Mini-batch trainer

    Each batch runs phase 1 (discriminator step, then encoder+decoder step)
    on the rows selected by the generative scope, and, when a head is
    attached, phase 2 (head loss on mu, backpropagated into the head and the
    encoder). Validation rows are only read for early stopping.
    """

    def __init__(self, model: VaeGanModel, head: Optional[ClassificationHead] = None):
        self.model = model
        self.head = head
        cfg = model.config
        if head is not None and head.input_dim != cfg.latent_dim:
            raise ShapeMismatchError(
                f"head expects {head.input_dim}-dimensional input, latent_dim is {cfg.latent_dim}"
            )
        opt_cfg = OptimizerConfig(learning_rate=cfg.learning_rate)
        # encoder_opt is shared by phase 1 and phase 2
        self.encoder_opt = Adam(model.encoder.parameters(), opt_cfg)
        self.decoder_opt = Adam(model.decoder.parameters(), opt_cfg)
        self.disc_opt = Adam(model.discriminator_parameters(), opt_cfg)
        self.head_opt = Adam(head.parameters(), opt_cfg) if head is not None else None
        self.batch_rng = np.random.default_rng(cfg.seed + 2)

    # ------------------------------------------------------------------ steps

    def generative_step(self, xb: np.ndarray) -> Dict[str, float]:
        """One discriminator update followed by one encoder+decoder update"""
        model, cfg = self.model, self.model.config
        enc = model.encode(xb, train=True)
        x_rec = model.decoder.forward(enc.z, train=True)

        n = xb.shape[0]
        probs = model.discriminator.forward(np.vstack([xb, x_rec]), train=True).ravel()
        p_real, p_fake = probs[:n], probs[n:]
        disc = discriminator_loss(p_real, p_fake)
        d_real, d_fake = discriminator_loss_grads(p_real, p_fake)
        model.discriminator.zero_grad()
        model.discriminator.backward(np.concatenate([d_real, d_fake])[:, None])
        self.disc_opt.step()

        p_fake = model.discriminator.forward(x_rec, train=True).ravel()
        adv = generator_adv_loss(p_fake)
        dx_adv = model.discriminator.backward(generator_adv_grad(p_fake)[:, None])
        parts = vae_loss(xb, x_rec, enc.mu, enc.logvar, cfg.kl_weight)

        losses = {"recon": parts.recon, "kl": parts.kl, "disc": disc, "adv": adv}
        if not all(np.isfinite(v) for v in losses.values()):
            raise TrainingDivergedError("non-finite VAE-GAN loss", losses=losses)

        model.encoder.zero_grad()
        model.decoder.zero_grad()
        dz = model.decoder.backward(cfg.recon_weight * mse_grad(xb, x_rec) + cfg.gan_weight * dx_adv)
        d_mu, d_logvar = reparameterize_backward(dz, enc.mu, enc.z)
        k_mu, k_logvar = kl_grad(enc.mu, enc.logvar)
        model.encoder.backward(d_mu + cfg.kl_weight * k_mu, d_logvar + cfg.kl_weight * k_logvar)
        self.encoder_opt.step()
        self.decoder_opt.step()
        return losses

    def head_step(self, xb: np.ndarray, yb: np.ndarray) -> Tuple[float, float]:
        """Head loss on mu for the full batch; returns (loss, encoder grad norm)"""
        mu, _ = self.model.encoder.forward(xb, train=True)
        self.head.zero_grad()
        loss, d_mu = self.head.loss_and_backward(mu, yb)
        if not np.isfinite(loss):
            raise TrainingDivergedError("non-finite head loss", losses={"head": loss})
        self.model.encoder.zero_grad()
        self.model.encoder.backward(d_mu, np.zeros_like(mu))
        grad_norm = float(np.sqrt(sum(np.sum(p.grad ** 2) for p in self.model.encoder.parameters())))
        self.head_opt.step()
        self.head.post_step()
        self.encoder_opt.step()
        return float(loss), grad_norm

    # ------------------------------------------------------------ validation

    def _generative_rows(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.model.config.generative_scope == GenerativeScope.MINORITY:
            return x[y == 1]
        return x

    def validation_recon(self, x: np.ndarray) -> Optional[float]:
        if x.shape[0] == 0:
            return None
        mu = self.model.encode_mean(x)
        return mse_loss(x, self.model.decode(mu))

    def _validate(self, log: EpochLog, val_x: Optional[np.ndarray], val_y: Optional[np.ndarray]):
        if val_x is None or val_x.shape[0] == 0:
            return None
        if val_y is None:
            val_y = np.ones(val_x.shape[0], dtype=np.int64)
        log.val_recon_loss = self.validation_recon(self._generative_rows(val_x, val_y))
        if self.head is None:
            return None if log.val_recon_loss is None else (-log.val_recon_loss,)

        mu = self.model.encode_mean(val_x)
        probs = self.head.predict_proba(mu)
        precision, recall, _ = prf(confusion(val_y, probs, 0.5))
        log.val_precision, log.val_recall = precision, recall
        log.val_silhouette = self._silhouette(mu, val_y)
        return (precision >= self.model.config.min_precision, recall, precision)

    def _silhouette(self, mu: np.ndarray, y: np.ndarray) -> Optional[float]:
        limit = self.model.config.silhouette_max_rows
        if limit == 0 or np.unique(y).size < 2:
            return None
        if y.size > limit:
            idx = np.sort(np.random.default_rng(self.model.config.seed).choice(y.size, limit, replace=False))
            mu, y = mu[idx], y[idx]
            if np.unique(y).size < 2:
                return None
        return silhouette(mu, y)

    # ----------------------------------------------------------------- loop

    def _snapshot(self):
        head_state = self.head.state_dict() if self.head is not None else None
        return self.model.state_dict(), head_state

    def _restore(self, snapshot) -> None:
        model_state, head_state = snapshot
        self.model.load_state_dict(model_state)
        if self.head is not None and head_state is not None:
            self.head.load_state_dict(head_state)

    def fit(
        self,
        train_x: np.ndarray,
        train_y: np.ndarray,
        val_x: Optional[np.ndarray] = None,
        val_y: Optional[np.ndarray] = None,
    ) -> TrainingLog:
        """
        Train for up to config.epochs with patience-based early stopping

        The best epoch's weights are restored before returning.
        """
        cfg = self.model.config
        train_x = np.asarray(train_x, dtype=np.float64)
        train_y = np.asarray(train_y).astype(np.int64)
        n = train_x.shape[0]
        log = TrainingLog()
        best_key, best_snapshot, stale = None, None, 0

        for epoch in range(1, cfg.epochs + 1):
            sums: Dict[str, List[float]] = {"recon": [], "kl": [], "disc": [], "adv": [], "head": [], "norm": []}
            order = self.batch_rng.permutation(n)
            for start in range(0, n, cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                xb, yb = train_x[idx], train_y[idx]
                gen_rows = self._generative_rows(xb, yb)
                if gen_rows.shape[0] > 0:
                    for k, v in self.generative_step(gen_rows).items():
                        sums[k].append(v)
                if self.head is not None:
                    loss, norm = self.head_step(xb, yb)
                    sums["head"].append(loss)
                    sums["norm"].append(norm)

            entry = EpochLog(
                epoch=epoch,
                recon_loss=_mean(sums["recon"]),
                kl_loss=_mean(sums["kl"]),
                disc_loss=_mean(sums["disc"]),
                gen_adv_loss=_mean(sums["adv"]),
                head_loss=_mean(sums["head"]) if self.head is not None else None,
                phase2_encoder_grad_norm=_mean(sums["norm"]),
            )
            key = self._validate(entry, val_x, val_y)
            log.epochs.append(entry)
            logger.info(
                "epoch %d: recon %.4f kl %.4f disc %.4f adv %.4f head %s val_recon %s val_P %s val_R %s",
                epoch, entry.recon_loss, entry.kl_loss, entry.disc_loss, entry.gen_adv_loss,
                _fmt(entry.head_loss), _fmt(entry.val_recon_loss), _fmt(entry.val_precision), _fmt(entry.val_recall),
            )

            if key is None:
                best_snapshot, log.best_epoch = self._snapshot(), epoch
                continue
            if best_key is None or key > best_key:
                best_key, best_snapshot, log.best_epoch, stale = key, self._snapshot(), epoch, 0
            else:
                stale += 1
                if stale >= cfg.patience:
                    logger.info("Early stop at epoch %d (best epoch %d)", epoch, log.best_epoch)
                    log.stopped_early = True
                    break

        if best_snapshot is not None:
            self._restore(best_snapshot)
        self.model.trained = True
        self.model.training_log = log
        return log


def _mean(values: List[float]) -> float:
    return float(np.mean(values)) if values else 0.0


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4f}"


def train_minority_oversampler(
    model: VaeGanModel, fraud_rows: np.ndarray, val_fraud_rows: Optional[np.ndarray] = None
) -> VaeGanModel:
    """
    Train on fraud rows only, early stopping on validation reconstruction loss

    Raises:
        ValueError: fewer than 2 fraud rows
        TrainingDivergedError: a loss became non-finite
    """
    fraud_rows = np.asarray(fraud_rows, dtype=np.float64)
    if fraud_rows.ndim != 2 or fraud_rows.shape[0] < 2:
        raise ValueError("the oversampler needs at least 2 fraud rows")
    logger.info("Training minority oversampler on %d fraud rows", fraud_rows.shape[0])
    val_y = None if val_fraud_rows is None else np.ones(len(val_fraud_rows), dtype=np.int64)
    VaeGanTrainer(model).fit(fraud_rows, np.ones(fraud_rows.shape[0], dtype=np.int64), val_fraud_rows, val_y)
    return model


def train_joint(
    model: VaeGanModel,
    head: Optional[ClassificationHead],
    train_x: np.ndarray,
    train_y: np.ndarray,
    val_x: Optional[np.ndarray] = None,
    val_y: Optional[np.ndarray] = None,
) -> Tuple[VaeGanModel, Optional[ClassificationHead]]:
    """
    Alternate generative updates with head updates that shape the encoder

    With head=None this is plain VAE-GAN training on the scoped rows.

    Raises:
        SingleClassError: training labels contain one class
        ShapeMismatchError: head input dimension differs from latent_dim
    """
    train_y = np.asarray(train_y).astype(np.int64)
    if np.unique(train_y).size < 2:
        raise SingleClassError("joint training needs both classes")
    logger.info(
        "Joint training on %d rows (%d fraud), head=%s, scope=%s",
        train_y.size, int(train_y.sum()), type(head).__name__ if head is not None else "none",
        model.config.generative_scope.value,
    )
    VaeGanTrainer(model, head).fit(train_x, train_y, val_x, val_y)
    return model, head
