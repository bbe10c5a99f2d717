"""
Stratified Splitter
Deterministic per-class train/validation partition
"""

import logging
import math

import numpy as np

from ..common.errors import SingleClassError
from .models import Dataset, SplitIndices

logger = logging.getLogger(__name__)

# Guards floor() against products such as 100 * 0.29 = 28.999999999999996
_FLOOR_SLACK = 1e-9


def _floor_count(count: int, ratio: float) -> int:
    return int(math.floor(count * ratio + _FLOOR_SLACK))


def stratified_split(dataset: Dataset, train_ratio: float, seed: int) -> SplitIndices:
    """
    Split rows into train and validation sets per class

    The minority class gets floor(count * ratio) training rows; the majority
    class takes the remainder of floor(n * ratio), which reproduces
    199,020 + 344 training rows on the 284,807-row credit-card file.

    Args:
        dataset: Dataset to split
        train_ratio: Fraction of rows for training, 0 < ratio < 1
        seed: Seed for the per-class shuffles

    Returns:
        SplitIndices with sorted, disjoint index arrays
    """
    if not 0.0 < train_ratio < 1.0:
        raise ValueError(f"train_ratio must lie in (0, 1), got {train_ratio}")
    if seed < 0:
        raise ValueError("seed must be non-negative")

    labels = dataset.labels
    counts = {c: int(np.sum(labels == c)) for c in (0, 1)}
    empty = [c for c, n in counts.items() if n == 0]
    if empty:
        raise SingleClassError(f"class {empty[0]} has no samples; cannot stratify")

    minority = 1 if counts[1] <= counts[0] else 0
    majority = 1 - minority
    n_train = {minority: _floor_count(counts[minority], train_ratio)}
    n_train[majority] = _floor_count(labels.shape[0], train_ratio) - n_train[minority]
    for c in (0, 1):
        if n_train[c] == 0:
            logger.warning("Class %d gets no training rows (%d rows at ratio %.3f)", c, counts[c], train_ratio)

    rng = np.random.default_rng(seed)
    train_parts, val_parts = [], []
    for c in (0, 1):
        members = np.flatnonzero(labels == c)
        shuffled = rng.permutation(members)
        train_parts.append(shuffled[: n_train[c]])
        val_parts.append(shuffled[n_train[c]:])

    split = SplitIndices(
        train_idx=np.sort(np.concatenate(train_parts)),
        val_idx=np.sort(np.concatenate(val_parts)),
        seed=seed,
        train_ratio=train_ratio,
    )
    logger.info(
        "Stratified split (ratio %.3f, seed %d): train %d normal + %d fraud, validation %d normal + %d fraud",
        train_ratio, seed, n_train[0], n_train[1], counts[0] - n_train[0], counts[1] - n_train[1],
    )
    return split
