"""
Gradient Check
Central-difference verification of analytic gradients
"""

import logging
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..common.errors import GradientCheckError
from .models import GradCheckReport

logger = logging.getLogger(__name__)

# Relative errors use max(|analytic|, |numeric|, floor) as denominator
DENOMINATOR_FLOOR = 1e-6


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), DENOMINATOR_FLOOR)


def grad_check(
    loss_fn: Callable[[], float],
    targets: Dict[str, Tuple[np.ndarray, np.ndarray]],
    tolerance: float = 1e-4,
    step: float = 1e-5,
    max_entries: Optional[int] = None,
    seed: int = 0,
    name: str = "probe",
) -> GradCheckReport:
    """
    Compare analytic gradients with central differences

    Args:
        loss_fn: Recomputes the scalar loss from the current array values
        targets: name -> (array perturbed in place, analytic gradient of the same shape)
        tolerance: Pass threshold on the maximum relative error
        step: Finite-difference step h
        max_entries: Check at most this many entries per array (sampled with ``seed``)
        seed: Sampling seed
        name: Label stored on the report

    Returns:
        GradCheckReport with the worst entry

    Raises:
        GradientCheckError: non-finite loss or gradient
    """
    rng = np.random.default_rng(seed)
    worst, worst_name, worst_index, checked = 0.0, None, None, 0

    for key, (array, analytic) in targets.items():
        analytic = np.asarray(analytic, dtype=np.float64)
        if analytic.shape != array.shape:
            raise GradientCheckError(f"{key}: gradient shape {analytic.shape} != {array.shape}")
        if not np.all(np.isfinite(analytic)):
            raise GradientCheckError(f"{key}: analytic gradient is not finite")
        flat_indices = np.arange(array.size)
        if max_entries is not None and array.size > max_entries:
            flat_indices = np.sort(rng.choice(array.size, size=max_entries, replace=False))

        for flat in flat_indices:
            idx = np.unravel_index(flat, array.shape)
            original = array[idx]
            array[idx] = original + step
            plus = loss_fn()
            array[idx] = original - step
            minus = loss_fn()
            array[idx] = original
            if not (np.isfinite(plus) and np.isfinite(minus)):
                raise GradientCheckError(f"{key}{list(idx)}: loss is not finite")
            numeric = (plus - minus) / (2.0 * step)
            err = relative_error(float(analytic[idx]), float(numeric))
            checked += 1
            if err > worst:
                worst, worst_name, worst_index = err, key, [int(i) for i in idx]

    report = GradCheckReport(
        name=name,
        max_rel_error=worst,
        worst_parameter=worst_name,
        worst_index=worst_index,
        n_checked=checked,
        tolerance=tolerance,
        step=step,
    )
    logger.debug("grad check %s: max rel err %.3e over %d entries", name, worst, checked)
    return report
