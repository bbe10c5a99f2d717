"""
Config Loader
Flat YAML experiment files merged with environment and command-line overrides
"""

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml
from pydantic import ValidationError

from ..common.errors import ConfigError
from ..common.settings import Settings, get_settings
from .models import ExperimentConfig

logger = logging.getLogger(__name__)

KNOWN_KEYS = frozenset(ExperimentConfig.__fields__)


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a flat key: value YAML mapping

    Raises:
        ConfigError: unreadable file, non-mapping document, nested values or unknown keys
    """
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from e

    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a key: value mapping")
    for key, value in doc.items():
        if isinstance(value, dict) and key != "focal":
            raise ConfigError(f"{path}: key {key!r} must not be nested")
    _check_keys(doc, str(path))
    return doc


def _check_keys(values: Mapping[str, Any], source: str) -> None:
    unknown = sorted(set(values) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"{source}: unknown config keys {', '.join(unknown)}")


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    settings: Optional[Settings] = None,
) -> ExperimentConfig:
    """
    Build an ExperimentConfig

    Precedence: overrides (command-line flags) > environment > file > defaults.
    Overrides whose value is None are ignored.

    Args:
        path: Optional YAML config file
        overrides: Values from command-line flags
        settings: Environment settings; read from the process environment when omitted

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigError: unknown keys or invalid values
    """
    values: Dict[str, Any] = read_config_file(path) if path is not None else {}

    settings = settings or get_settings()
    if settings.output_dir:
        values["output_dir"] = settings.output_dir

    flags = {k: v for k, v in (overrides or {}).items() if v is not None}
    _check_keys(flags, "command line")
    values.update(flags)

    try:
        cfg = ExperimentConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment config: {e}") from e
    logger.debug("Loaded config: %s", cfg.echo())
    return cfg


def dump_config(cfg: ExperimentConfig, path: Union[str, Path]) -> Path:
    """Write cfg as a flat YAML file that load_config reads back"""
    path = Path(path)
    path.write_text(yaml.safe_dump(cfg.echo(), sort_keys=True), encoding="utf-8")
    return path
