"""
Threshold Agent
Learn a decision threshold by gradient descent on a sigmoid-relaxed prediction error
"""

import logging
from typing import Optional

import numpy as np

from ..common.errors import SingleClassError
from ..neural_core.functional import sigmoid
from .metrics import confusion, prf, _as_vectors
from .models import ThresholdAgentConfig, ThresholdFit

logger = logging.getLogger(__name__)


class ThresholdAgent:
    """
    Threshold tau = sigmoid(theta) trained on validation probabilities

    The surrogate is mean((sigmoid(k * (p - tau)) - y)^2) with sharpness k.
    F1 is evaluated at every visited tau; the best-F1 tau is kept, ties
    going to the lower surrogate loss.
    Every fit starts from config.theta_init.
    """

    def __init__(self, config: Optional[ThresholdAgentConfig] = None):
        self.config = config or ThresholdAgentConfig()
        self.theta = self.config.theta_init

    @property
    def tau(self) -> float:
        return float(sigmoid(np.array(self.theta)))

    def surrogate_loss(self, probabilities: np.ndarray, labels: np.ndarray, tau: float) -> float:
        soft = sigmoid(self.config.sharpness * (probabilities - tau))
        return float(np.mean((soft - labels) ** 2))

    def gradient(self, probabilities: np.ndarray, labels: np.ndarray) -> float:
        """dL/dtheta at the current theta"""
        tau = self.tau
        k = self.config.sharpness
        soft = sigmoid(k * (probabilities - tau))
        return float(np.mean(2.0 * (soft - labels) * soft * (1.0 - soft) * -k) * tau * (1.0 - tau))

    def fit(self, probabilities, labels) -> ThresholdFit:
        """
        Run the descent and return the chosen threshold with its trajectory

        Raises:
            SingleClassError: labels contain one class
        """
        y, p = _as_vectors(labels, probabilities)
        if np.unique(y).size < 2:
            raise SingleClassError("threshold fitting needs both classes")
        self.theta = self.config.theta_init
        if np.all(p == p[0]):
            logger.warning("All probabilities are equal (%.4f); using threshold 0.5", p[0])
            f1 = prf(confusion(y, p, 0.5))[2]
            return ThresholdFit(threshold=0.5, best_f1=f1, degenerate=True)

        y = y.astype(np.float64)
        taus, losses, f1s = [], [], []
        for step in range(self.config.steps + 1):
            tau = self.tau
            taus.append(tau)
            losses.append(self.surrogate_loss(p, y, tau))
            f1s.append(prf(confusion(y, p, tau))[2])
            if step < self.config.steps:
                self.theta -= self.config.learning_rate * self.gradient(p, y)

        order = np.lexsort((np.asarray(losses), -np.asarray(f1s)))
        best = int(order[0])
        tau_best = min(max(taus[best], np.nextafter(0.0, 1.0)), np.nextafter(1.0, 0.0))
        logger.info(
            "Threshold agent: tau %.4f (F1 %.4f) after %d steps, final tau %.4f",
            tau_best, f1s[best], self.config.steps, taus[-1],
        )
        return ThresholdFit(threshold=tau_best, best_f1=f1s[best], taus=taus, losses=losses, f1_scores=f1s)


def fit_threshold(agent: ThresholdAgent, probabilities, labels) -> float:
    return agent.fit(probabilities, labels).threshold
