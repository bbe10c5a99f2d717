"""
CPAC Trainer
Standalone training with composite-score checkpointing
"""

import logging
from typing import Optional

import numpy as np

from ..common.errors import SingleClassError, TrainingDivergedError
from ..eval_metrics.metrics import confusion, prf
from ..neural_core.heads import ClassificationHead
from ..neural_core.models import OptimizerConfig
from ..neural_core.optimizer import Adam
from .models import CpacEpochLog, CpacTrainConfig, CpacTrainResult

logger = logging.getLogger(__name__)


def train_standalone(
    model: ClassificationHead,
    train_x: np.ndarray,
    train_y: np.ndarray,
    val_x: np.ndarray,
    val_y: np.ndarray,
    cfg: Optional[CpacTrainConfig] = None,
) -> CpacTrainResult:
    """
    Train CPAC (or any other head) on feature rows and keep the best composite-score weights

    After each epoch the validation score S = w_P * precision + w_R * recall
    is computed at cfg.threshold; the weights with the highest S are restored
    at the end. Training stops after cfg.patience epochs without improvement.

    Raises:
        SingleClassError: training labels contain one class
        TrainingDivergedError: the loss became non-finite
    """
    cfg = cfg or CpacTrainConfig()
    train_x = np.asarray(train_x, dtype=np.float64)
    train_y = np.asarray(train_y).astype(np.int64)
    if np.unique(train_y).size < 2:
        raise SingleClassError("head training needs both classes")

    model.set_loss(cfg.loss_mode, cfg.focal)
    optimizer = Adam(model.parameters(), OptimizerConfig(learning_rate=cfg.learning_rate))
    rng = np.random.default_rng(cfg.seed)
    result = CpacTrainResult()
    best_state, best_score, stale = None, -np.inf, 0
    n = train_x.shape[0]

    logger.info(
        "Training %s on %d rows (%d fraud), loss=%s, epochs=%d",
        type(model).__name__, n, int(train_y.sum()), cfg.loss_mode.value, cfg.epochs,
    )
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            model.zero_grad()
            loss, _ = model.loss_and_backward(train_x[idx], train_y[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError("non-finite head loss", epoch=epoch, losses={"total": loss})
            optimizer.step()
            model.post_step()
            losses.append(loss)

        precision, recall, _ = prf(confusion(val_y, model.predict_proba(val_x), cfg.threshold))
        score = cfg.precision_weight * precision + cfg.recall_weight * recall
        result.history.append(
            CpacEpochLog(
                epoch=epoch, train_loss=float(np.mean(losses)),
                val_precision=precision, val_recall=recall, val_score=score,
            )
        )
        logger.info(
            "%s epoch %d: loss %.5f val P %.4f R %.4f S %.4f",
            type(model).__name__, epoch, np.mean(losses), precision, recall, score,
        )

        if score > best_score:
            best_score, best_state, stale = score, model.state_dict(), 0
            result.best_epoch, result.best_score = epoch, score
        else:
            stale += 1
            if stale >= cfg.patience:
                logger.info("Early stop at epoch %d (best epoch %d)", epoch, result.best_epoch)
                result.stopped_early = True
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    return result
