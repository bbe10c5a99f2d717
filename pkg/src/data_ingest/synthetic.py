"""
Synthetic Transactions
Two-Gaussian stand-in for the credit-card file so the pipeline runs without it
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from .models import CREDITCARD_FEATURES, LABEL_COLUMN, Dataset

logger = logging.getLogger(__name__)


def make_synthetic_transactions(
    n_rows: int = 20_000,
    n_features: int = 30,
    minority_fraction: float = 0.002,
    separation: float = 4.0,
    n_shifted: int = 5,
    seed: int = 0,
) -> Dataset:
    """
    Generate an imbalanced two-Gaussian dataset

    Normal rows are N(0, I); fraud rows are N(s, I) where s equals
    ``separation`` on the first ``n_shifted`` coordinates and 0 elsewhere.

    Args:
        n_rows: Total rows
        n_features: Feature count (30 gives the credit-card column names)
        minority_fraction: Fraction of fraud rows, at least 2 frauds are drawn
        separation: Mean shift of the fraud class per shifted coordinate
        n_shifted: Number of shifted coordinates
        seed: Random seed

    Returns:
        Dataset with rows in shuffled order
    """
    if n_rows < 4:
        raise ValueError("n_rows must be at least 4")
    if not 0.0 < minority_fraction < 0.5:
        raise ValueError("minority_fraction must lie in (0, 0.5)")
    if not 1 <= n_shifted <= n_features:
        raise ValueError("n_shifted must lie in [1, n_features]")

    rng = np.random.default_rng(seed)
    n_fraud = max(2, int(round(n_rows * minority_fraction)))
    n_normal = n_rows - n_fraud

    shift = np.zeros(n_features)
    shift[:n_shifted] = separation
    normal = rng.standard_normal((n_normal, n_features))
    fraud = rng.standard_normal((n_fraud, n_features)) + shift

    features = np.vstack([normal, fraud])
    labels = np.concatenate([np.zeros(n_normal, dtype=np.int64), np.ones(n_fraud, dtype=np.int64)])
    order = rng.permutation(n_rows)

    columns = list(CREDITCARD_FEATURES) if n_features == 30 else [f"f{i}" for i in range(1, n_features + 1)]
    logger.info(
        "Generated %d synthetic transactions (%d fraud, %d features, separation %.2f)",
        n_rows, n_fraud, n_features, separation,
    )
    return Dataset(features=features[order], labels=labels[order], column_names=columns)


def write_transactions_csv(dataset: Dataset, path: Union[str, Path]) -> Path:
    """
    Write a Dataset in the transaction CSV layout (features then Class)

    Args:
        dataset: Rows to write
        path: Destination file

    Returns:
        Path written
    """
    path = Path(path)
    frame = pd.DataFrame(dataset.features, columns=dataset.column_names)
    frame[LABEL_COLUMN] = dataset.labels
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
