"""
Classifier Heads Module - LatentGuard v1.0
Latent MLP heads and the logistic-regression baseline
"""

from .logreg import LogisticRegressionClassifier, logreg_fit, logreg_predict
from .mlp_heads import MlpHead, build_head_network, mlp_forward
from .models import LogRegConfig, LogRegParams, MlpHeadConfig

__all__ = [
    "LogisticRegressionClassifier", "logreg_fit", "logreg_predict",
    "MlpHead", "build_head_network", "mlp_forward",
    "LogRegConfig", "LogRegParams", "MlpHeadConfig",
]

__version__ = "1.0.0"
