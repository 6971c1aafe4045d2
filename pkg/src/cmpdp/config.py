"""Run configuration: training knobs plus evaluation knobs, loadable from a
``key=value`` file with ``#`` comments. Environment variables prefixed
``CMPDP_`` (e.g. CMPDP_LR=0.01) override file values."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from .selftrain import TrainConfig

ENV_PREFIX = "CMPDP_"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig(TrainConfig):
    """TrainConfig plus the evaluation-side settings."""

    exact_budget: int = 2_000_000
    local_search_seconds: float = 1.0
    local_search_moves: int = 2000

    def validate(self) -> None:
        super().validate()
        if self.exact_budget < 1:
            raise ValueError("exact_budget must be positive")
        if self.local_search_seconds < 0:
            raise ValueError("local_search_seconds must be non-negative")
        if self.local_search_moves < 0:
            raise ValueError("local_search_moves must be non-negative")


def load_config(path: str | Path | None = None, env: Mapping[str, str] | None = None) -> RunConfig:
    """Defaults, overridden by the file (if given), overridden by CMPDP_*
    environment variables. Unknown keys and bad values raise ConfigError
    naming the key."""
    values: dict[str, str] = {}
    if path is not None:
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    env = os.environ if env is None else env
    for key, value in env.items():
        if key.startswith(ENV_PREFIX):
            values[key[len(ENV_PREFIX) :].lower()] = value
    return config_from_values(values)


def config_from_values(values: Mapping[str, str]) -> RunConfig:
    cfg = RunConfig()
    known = {f.name: f.type for f in fields(RunConfig)}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(cfg, key, _convert(key, value, type(getattr(cfg, key))))
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _convert(key: str, value: str, kind: type):
    if kind is bool:
        low = value.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}") from None
