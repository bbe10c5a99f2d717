"""
Checkpoint
JSON documents of named flat arrays with shapes and a format version
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, validator

from ..common.errors import CheckpointError, CheckpointVersionError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class ArrayRecord(BaseModel):
    shape: List[int]
    data: List[float]

    @validator("data")
    def size_matches(cls, v, values):
        shape = values.get("shape")
        if shape is not None and int(np.prod(shape, dtype=np.int64)) != len(v):
            raise ValueError(f"data length {len(v)} does not match shape {shape}")
        return v

    @classmethod
    def from_array(cls, array: np.ndarray) -> "ArrayRecord":
        array = np.asarray(array, dtype=np.float64)
        if not np.all(np.isfinite(array)):
            raise CheckpointError("refusing to store a non-finite array")
        return cls(shape=list(array.shape), data=array.ravel().tolist())

    def to_array(self) -> np.ndarray:
        return np.asarray(self.data, dtype=np.float64).reshape(self.shape)


class CheckpointDocument(BaseModel):
    """Serialized model: kind tag, constructor config, arrays and free-form metadata"""
    format_version: int = FORMAT_VERSION
    kind: str
    config: Dict[str, Any] = Field(default_factory=dict)
    arrays: Dict[str, ArrayRecord] = Field(default_factory=dict)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    def array_dict(self) -> Dict[str, np.ndarray]:
        return {k: r.to_array() for k, r in self.arrays.items()}


def save_checkpoint(
    path: Union[str, Path],
    kind: str,
    arrays: Dict[str, np.ndarray],
    config: Optional[Dict[str, Any]] = None,
    metadata: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write a checkpoint document"""
    path = Path(path)
    doc = CheckpointDocument(
        kind=kind,
        config=config or {},
        arrays={k: ArrayRecord.from_array(v) for k, v in arrays.items()},
        metadata=metadata or {},
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc.dict(), sort_keys=True), encoding="utf-8")
    logger.info("Saved %s checkpoint with %d arrays to %s", kind, len(arrays), path)
    return path


def load_checkpoint(path: Union[str, Path], expected_kind: Optional[str] = None) -> CheckpointDocument:
    """
    Read a checkpoint document

    Raises:
        CheckpointError: missing file, invalid JSON, wrong kind or malformed arrays
        CheckpointVersionError: format_version differs from FORMAT_VERSION
    """
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"Checkpoint not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise CheckpointError(f"{path}: expected a JSON object")
    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(found=version, expected=FORMAT_VERSION)
    try:
        doc = CheckpointDocument.parse_obj(raw)
    except ValidationError as exc:
        raise CheckpointError(f"{path}: malformed checkpoint ({exc})") from exc
    if expected_kind is not None and doc.kind != expected_kind:
        raise CheckpointError(f"{path}: expected a {expected_kind!r} checkpoint, found {doc.kind!r}")
    return doc
