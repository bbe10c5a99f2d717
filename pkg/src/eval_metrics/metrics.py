"""
Metrics
Confusion counts, precision/recall/F1, composite score, AUC-ROC and silhouette
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

from ..common.errors import ShapeMismatchError, SingleClassError
from .models import ConfusionCounts, MetricsReport

logger = logging.getLogger(__name__)

SILHOUETTE_CHUNK = 1024


def _as_vectors(labels, probabilities) -> Tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels).ravel()
    p = np.asarray(probabilities, dtype=np.float64).ravel()
    if y.shape != p.shape:
        raise ShapeMismatchError(f"labels ({y.size}) and scores ({p.size}) differ in length")
    return y.astype(np.int64), p


def confusion(labels, probabilities, threshold: float = 0.5) -> ConfusionCounts:
    """Tally counts with prediction = 1 iff probability > threshold"""
    y, p = _as_vectors(labels, probabilities)
    pred = p > threshold
    pos = y == 1
    return ConfusionCounts(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        tn=int(np.sum(~pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def prf(counts: ConfusionCounts) -> Tuple[float, float, float]:
    """Precision, recall and F1; a zero denominator gives 0"""
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def composite(precision: float, recall: float) -> float:
    """Model-selection score 0.5 P + 0.5 R"""
    return 0.5 * precision + 0.5 * recall


def auc_roc(labels, scores) -> float:
    """
    Rank-based AUC with mid-rank ties

    Raises:
        SingleClassError: only one class present
    """
    y, s = _as_vectors(labels, scores)
    n_pos = int(np.sum(y == 1))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUC-ROC needs both classes")
    ranks = rankdata(s, method="average")
    return float((ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def evaluate(labels, probabilities, threshold: float = 0.5) -> MetricsReport:
    """Full report; auc_roc is None when one class is missing"""
    counts = confusion(labels, probabilities, threshold)
    precision, recall, f1 = prf(counts)
    try:
        auc: Optional[float] = auc_roc(labels, probabilities)
    except SingleClassError:
        logger.warning("AUC-ROC undefined: validation labels contain one class")
        auc = None
    return MetricsReport(
        **counts.dict(),
        precision=precision,
        recall=recall,
        f1=f1,
        auc_roc=auc,
        composite=composite(precision, recall),
        threshold=threshold,
    )


def silhouette(x: np.ndarray, labels) -> float:
    """
    Mean silhouette coefficient under the Euclidean metric

    Points in singleton clusters score 0. Distances are computed in row
    chunks so memory stays O(chunk x n).

    Raises:
        SingleClassError: fewer than two clusters
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(labels).ravel()
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ShapeMismatchError("silhouette: rows and labels differ")
    clusters, inverse = np.unique(y, return_inverse=True)
    if clusters.size < 2:
        raise SingleClassError("silhouette needs at least two clusters")

    onehot = np.zeros((y.size, clusters.size))
    onehot[np.arange(y.size), inverse] = 1.0
    sizes = onehot.sum(axis=0)
    scores = np.zeros(y.size)

    for start in range(0, y.size, SILHOUETTE_CHUNK):
        stop = min(start + SILHOUETTE_CHUNK, y.size)
        sums = cdist(x[start:stop], x) @ onehot
        own = inverse[start:stop]
        rows = np.arange(stop - start)
        own_size = sizes[own]
        a = np.where(own_size > 1, sums[rows, own] / np.maximum(own_size - 1, 1), 0.0)
        means = sums / sizes
        means[rows, own] = np.inf
        b = means.min(axis=1)
        denom = np.maximum(a, b)
        s = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
        scores[start:stop] = np.where(own_size > 1, s, 0.0)

    return float(scores.mean())
