from __future__ import annotations

import importlib.util
import logging
import os
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from entropik.errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_FILE = "epkconfig.py"
ENV_PREFIX = "ENTROPIK_"


class Config(BaseModel):
    """Run settings; each field can come from ``epkconfig.py``, ``ENTROPIK_<FIELD>`` or a flag."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    max_order: int = Field(4, ge=1)
    trials: int = Field(100, ge=0)
    seed: int = 0
    depth: int = Field(3, ge=1)
    output: Literal["text", "json", "latex"] = "text"
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    workers: int = Field(4, ge=1)
    oracle_range: int = Field(9, ge=1)
    oracle_attempts: int = Field(50, ge=1)
    session_log: bool = True


def _load_file(path: Path) -> dict[str, Any]:
    spec = importlib.util.spec_from_file_location("epkconfig", path)
    if spec is None or spec.loader is None:
        raise ConfigError(f"{path}: not a loadable Python file")
    module = importlib.util.module_from_spec(spec)
    try:
        spec.loader.exec_module(module)
    except Exception as e:
        logger.exception(e)
        raise ConfigError(f"{path}: {e}") from e
    found = getattr(module, "config", None)
    if found is None:
        raise ConfigError(f"{path}: no 'config' object")
    if isinstance(found, Config):
        return found.model_dump(exclude_unset=True)
    if isinstance(found, dict):
        return dict(found)
    raise ConfigError(f"{path}: 'config' must be an entropik Config")


def _from_env(environ) -> dict[str, str]:
    out: dict[str, str] = {}
    for name in Config.model_fields:
        value = environ.get(ENV_PREFIX + name.upper())
        if value is not None:
            out[name] = value
    return out


def get_config(overrides: dict[str, Any] | None = None, cwd: Path | None = None, environ=None) -> Config:
    """Defaults, then ``epkconfig.py`` in ``cwd``, then the environment, then ``overrides``."""
    values: dict[str, Any] = {}
    path = (cwd or Path.cwd()) / CONFIG_FILE
    if path.is_file():
        values.update(_load_file(path))
        logger.debug("loaded %s", path)
    values.update(_from_env(os.environ if environ is None else environ))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if isinstance(values.get("log_level"), str):
        values["log_level"] = values["log_level"].upper()
    try:
        return Config(**values)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"invalid configuration: {problems}") from None
