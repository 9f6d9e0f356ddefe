"""Pipeline configuration with file, environment, and flag layering.

Precedence, lowest to highest: built-in defaults, config file (TOML or
JSON), ``CORPUSQC_*`` environment variables, explicit command-line flags.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

ENV_PREFIX = "CORPUSQC_"


class ConfigError(ValueError):
    """A configuration value failed validation."""

    def __init__(self, field_name: str, message: str) -> None:
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass(frozen=True)
class PipelineConfig:
    out_dir: str = "out"
    seed: int = 42
    jobs: int = 0  # 0 means use every available core
    min_words: int = 10
    max_description_tokens: int = 50
    max_code_tokens: int = 450
    max_code_chars: int = 800
    shared_k: int = 500
    max_n: int = 4
    epsilon: float = 1e-9
    exact_threshold: int = 25
    top_k: int = 5
    gate: str = ""  # severity that makes scan exit non-zero, empty disables

    def __post_init__(self) -> None:
        positive = (
            "seed",
            "min_words",
            "max_description_tokens",
            "max_code_tokens",
            "max_code_chars",
            "max_n",
            "exact_threshold",
            "top_k",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(name, f"must be positive, got {getattr(self, name)}")
        if self.jobs < 0:
            raise ConfigError("jobs", f"must be >= 0, got {self.jobs}")
        if self.shared_k < 0:
            raise ConfigError("shared_k", f"must be >= 0, got {self.shared_k}")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon", f"must be in (0, 1), got {self.epsilon}")
        if self.gate and self.gate not in ("info", "warning", "error"):
            raise ConfigError("gate", f"must be info, warning, or error, got {self.gate!r}")

    def effective_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(name: str, raw: object) -> object:
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"cannot parse {raw!r}: {exc}") from exc


def _read_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"no such file: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON in {path}: {exc}") from exc
    else:
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", f"invalid TOML in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config", f"{path} must contain a mapping")
    return doc


def load_config(
    path: str | Path | None = None,
    env: dict | None = None,
    overrides: dict | None = None,
) -> PipelineConfig:
    """Resolve the effective configuration.

    ``overrides`` holds explicit flag values (None entries are ignored).
    Unknown keys anywhere are an error so typos never pass silently.
    """
    env = os.environ if env is None else env
    values: dict[str, object] = {}

    if path is not None:
        for key, raw in _read_file(path).items():
            if key not in _FIELD_TYPES:
                raise ConfigError(key, "unknown configuration key")
            values[key] = _coerce(key, raw)

    for name in _FIELD_TYPES:
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = _coerce(name, raw)

    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(key, "unknown configuration key")
        values[key] = _coerce(key, raw)

    return PipelineConfig(**values)


def config_snapshot(config: PipelineConfig) -> dict:
    return dataclasses.asdict(config)


__all__ = ["ConfigError", "ENV_PREFIX", "PipelineConfig", "config_snapshot", "load_config"]
