"""
SMOTE Sampler Module - LatentGuard v1.0
Synthetic minority oversampling by nearest-neighbor interpolation
"""

from .models import SmoteConfig
from .smote_service import SmoteSampler, generate, interpolate, knn_minority

__all__ = ["SmoteConfig", "SmoteSampler", "generate", "interpolate", "knn_minority"]

__version__ = "1.0.0"
