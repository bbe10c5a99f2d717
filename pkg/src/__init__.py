"""
LatentGuard
Latent-space oversampling experiments for credit-card fraud detection
"""

__version__ = "1.0.0"
