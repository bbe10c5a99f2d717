"""
Checkpoint Service
Save and load any trained model by its checkpoint kind
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Type, Union

from ..classifier_heads.logreg import LogisticRegressionClassifier
from ..classifier_heads.mlp_heads import MlpHead
from ..common.errors import CheckpointError
from ..cpac_head.cpac import CpacModel
from ..neural_core.checkpoint import load_checkpoint as read_document
from ..vaegan_core.vaegan_model import VaeGanModel

logger = logging.getLogger(__name__)

Checkpointable = Union[VaeGanModel, CpacModel, MlpHead, LogisticRegressionClassifier]

MODEL_TYPES: Dict[str, Type] = {
    "vaegan": VaeGanModel,
    "cpac": CpacModel,
    "mlp_head": MlpHead,
    "logreg": LogisticRegressionClassifier,
}


def save_checkpoint(model: Checkpointable, path: Union[str, Path], metadata: Optional[dict] = None) -> Path:
    """
    Write a model or head checkpoint

    Raises:
        CheckpointError: unsupported object or non-finite parameters
    """
    if not isinstance(model, tuple(MODEL_TYPES.values())):
        raise CheckpointError(f"cannot checkpoint {type(model).__name__}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        if isinstance(model, LogisticRegressionClassifier):
            return model.save(path)
        return model.save(path, metadata=metadata)
    except ValueError as e:
        if isinstance(e, CheckpointError):
            raise
        raise CheckpointError(f"cannot save {type(model).__name__} to {path}: {e}") from e


def load_checkpoint(path: Union[str, Path]) -> Checkpointable:
    """
    Load whatever model the checkpoint holds

    Raises:
        CheckpointVersionError: unsupported format version
        CheckpointError: missing, corrupted or unknown-kind file
    """
    kind = read_document(path).kind
    model_type = MODEL_TYPES.get(kind)
    if model_type is None:
        raise CheckpointError(f"{path}: unknown checkpoint kind {kind!r}")
    logger.debug("Loading %s checkpoint from %s", kind, path)
    return model_type.load(path)
