"""
Errors
Exception hierarchy shared by all LatentGuard modules
"""

from typing import Optional


class LatentGuardError(Exception):
    """Base class for every error raised by LatentGuard"""


class DataIngestError(LatentGuardError, ValueError):
    """Raised when a transaction file cannot be read or parsed"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ShapeMismatchError(LatentGuardError, ValueError):
    """Raised when array shapes do not line up"""


class NotFittedError(LatentGuardError, RuntimeError):
    """Raised when a model is used before it was trained or fitted"""


class SingleClassError(LatentGuardError, ValueError):
    """Raised when an operation needs both classes but only one is present"""


class TrainingDivergedError(LatentGuardError, RuntimeError):
    """Raised when a loss becomes NaN or infinite during training"""

    def __init__(self, message: str, epoch: Optional[int] = None, losses: Optional[dict] = None):
        self.epoch = epoch
        self.losses = losses or {}
        details = f" (epoch {epoch}, losses {self.losses})" if epoch is not None else ""
        super().__init__(f"{message}{details}")


class GradientCheckError(LatentGuardError, ValueError):
    """Raised when a gradient check meets non-finite values"""


class CheckpointError(LatentGuardError, ValueError):
    """Raised when a checkpoint file is missing, corrupted or of the wrong kind"""


class CheckpointVersionError(CheckpointError):
    """Raised when a checkpoint was written with an unsupported format version"""

    def __init__(self, found: object, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"Unsupported checkpoint format_version {found!r} (expected {expected})")


class ConfigError(LatentGuardError, ValueError):
    """Raised for invalid experiment configuration"""


class PipelineStageError(LatentGuardError):
    """Raised when a pipeline stage fails; wraps the original cause"""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
