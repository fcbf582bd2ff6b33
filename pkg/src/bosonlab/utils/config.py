"""Runtime settings: packaged YAML defaults, an optional user file, then the environment."""

from __future__ import annotations

import os
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

import psutil
import yaml
from dotenv import load_dotenv

from bosonlab.utils.exceptions import ValidationError

load_dotenv()

CONFIG_ENV_VAR = "BOSONLAB_CONFIG_FILE"
DEFAULT_CONFIG_NAME = "config.yaml"
ENV_PREFIX = "BOSONLAB__"
PACKAGE_ROOT = "bosonlab"

ENVIRONMENT_ALIASES: dict[str, tuple[str, ...]] = {
    "BOSONLAB_THREADS": ("runtime", "threads"),
    "BOSONLAB_LOG_LEVEL": ("logging", "level"),
    "BOSONLAB_LOG_DIR": ("logging", "log_dir"),
}

PATH_FIELD_KEYS: set[tuple[str, ...]] = {("logging", "log_dir")}


class ConfigNode(dict):
    """Dictionary with attribute access; nested mappings are wrapped on insert."""

    def __init__(self, data: Mapping[str, Any]) -> None:
        super().__init__()
        for key, value in data.items():
            self[key] = value

    def __getattr__(self, name: str) -> Any:
        try:
            return self[name]
        except KeyError as exc:  # pragma: no cover - mirrors attr behaviour
            raise AttributeError(name) from exc

    def __setattr__(self, key: str, value: Any) -> None:
        self[key] = value

    def __setitem__(self, key: str, value: Any) -> None:
        super().__setitem__(key, _wrap(value))


def _wrap(value: Any) -> Any:
    if isinstance(value, Mapping) and not isinstance(value, ConfigNode):
        return ConfigNode(value)
    if isinstance(value, list):
        return [_wrap(item) for item in value]
    return value


class Config(ConfigNode):
    """Top-level settings with typed lookups for guards and tolerances."""

    def guard(self, name: str) -> int:
        """Integer ceiling from the ``guards`` section."""
        try:
            return int(self["guards"][name])
        except KeyError as exc:
            raise ValidationError(f"unknown guard '{name}'") from exc

    def tolerance(self, name: str) -> float:
        try:
            return float(self["tolerances"][name])
        except KeyError as exc:
            raise ValidationError(f"unknown tolerance '{name}'") from exc

    def threads(self, override: int | None = None) -> int:
        """Worker count: explicit override, then config, then physical cores."""
        value = override if override is not None else self["runtime"].get("threads")
        if value is None:
            value = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
        value = int(value)
        if value < 1:
            raise ValidationError(f"thread count must be positive, got {value}")
        return value


def _read_yaml(handle: Any) -> dict[str, Any]:
    data = yaml.safe_load(handle) or {}
    if not isinstance(data, dict):
        raise ValidationError("configuration file must contain a mapping")
    return data


def _load_layers(path_override: str | Path | None) -> dict[str, Any]:
    resource = resources.files(PACKAGE_ROOT).joinpath(DEFAULT_CONFIG_NAME)
    with resource.open("r", encoding="utf-8") as handle:
        merged = _read_yaml(handle)

    if path_override:
        user_path = Path(path_override).expanduser().resolve()
        with user_path.open("r", encoding="utf-8") as handle:
            merged = _deep_merge(merged, _read_yaml(handle))
    return merged


def _env_path(key: str) -> tuple[str, ...] | None:
    if key in ENVIRONMENT_ALIASES:
        return ENVIRONMENT_ALIASES[key]
    if not key.startswith(ENV_PREFIX):
        return None
    parts = tuple(part.lower() for part in key[len(ENV_PREFIX) :].split("__") if part)
    return parts or None


def _parse_env_value(raw_value: str) -> Any:
    try:
        return yaml.safe_load(raw_value)
    except yaml.YAMLError:
        return raw_value


def _set_path(tree: dict[str, Any], path: Iterable[str], value: Any) -> None:
    *parents, leaf = list(path)
    for segment in parents:
        tree = tree.setdefault(segment, {})
    tree[leaf] = value


def _env_overrides(environ: Mapping[str, str]) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for key, raw_value in environ.items():
        path = _env_path(key)
        if path:
            _set_path(overrides, path, _parse_env_value(raw_value))
    return overrides


def _deep_merge(base: dict[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(merged.get(key), dict) and isinstance(value, Mapping):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _coerce_paths(data: Any, path: tuple[str, ...] = ()) -> Any:
    if isinstance(data, dict):
        return {key: _coerce_paths(value, path + (key,)) for key, value in data.items()}
    if isinstance(data, str) and path in PATH_FIELD_KEYS:
        return Path(data).expanduser()
    return data


@lru_cache(maxsize=4)
def get_config(config_path: str | Path | None = None) -> Config:
    """Load settings, layering the environment over any user file."""
    layered = _load_layers(config_path or os.environ.get(CONFIG_ENV_VAR))
    merged = _deep_merge(layered, _env_overrides(os.environ))
    return Config(_coerce_paths(merged))


__all__ = ["Config", "ConfigNode", "get_config"]
