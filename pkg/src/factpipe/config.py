"""Configuration loading with flag > environment > file > default precedence.

Config files are simple KEY = VALUE lines. API keys are environment-only;
a key smuggled into a config file is rejected rather than silently honored.
"""

from __future__ import annotations

import os
from dataclasses import fields
from pathlib import Path
from typing import Any, Mapping

from .orchestrator import BackendEndpoints, PipelineConfig

# Settings a config file may carry, mapped onto config fields.
_FILE_KEYS = {
    "mode": ("mode", str),
    "kg_classifier": ("kg_classifier", str),
    "web_classifier": ("web_classifier", str),
    "scorer_backend": ("scorer_backend", str),
    "k": ("k", int),
    "n_max": ("n_max", int),
    "triple_cap": ("triple_cap", int),
    "budget_seconds": ("budget_seconds", float),
    "fixture_dir": ("fixture_dir", str),
    "sparql_endpoint": ("endpoints.sparql_endpoint", str),
    "primary_linker_url": ("endpoints.primary_linker_url", str),
    "fallback_linker_url": ("endpoints.fallback_linker_url", str),
    "linker_dictionary": ("endpoints.linker_dictionary", str),
    "chat_api_url": ("endpoints.chat_api_url", str),
    "chat_model": ("endpoints.chat_model", str),
    "scorer_url": ("endpoints.scorer_url", str),
    "nli_url": ("endpoints.nli_url", str),
}

_SECRET_FILE_KEYS = ("chat_api_key", "search_api_key", "search_engine_id")

# Environment variables, including the secrets that may only come from here.
_ENV_KEYS = {
    "SPARQL_ENDPOINT": "endpoints.sparql_endpoint",
    "PRIMARY_LINKER_URL": "endpoints.primary_linker_url",
    "FALLBACK_LINKER_URL": "endpoints.fallback_linker_url",
    "LINKER_DICTIONARY": "endpoints.linker_dictionary",
    "CHAT_API_URL": "endpoints.chat_api_url",
    "CHAT_MODEL": "endpoints.chat_model",
    "SCORER_URL": "endpoints.scorer_url",
    "NLI_URL": "endpoints.nli_url",
    "FIXTURE_DIR": "fixture_dir",
    "CHAT_API_KEY": "chat_api_key",
    "SEARCH_API_KEY": "search_api_key",
    "SEARCH_ENGINE_ID": "search_engine_id",
}

_CONFIG_FIELDS = {f.name for f in fields(PipelineConfig)}
_ENDPOINT_FIELDS = {f.name for f in fields(BackendEndpoints)}


def parse_config_file(path: Path | str) -> dict[str, str]:
    """KEY = VALUE lines; # starts a comment; unknown or secret keys are errors."""
    settings: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {line_no}: expected KEY = VALUE, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key in _SECRET_FILE_KEYS:
            raise ValueError(f"config line {line_no}: {key} is environment-only, refusing to read it from a file")
        if key not in _FILE_KEYS:
            raise ValueError(f"config line {line_no}: unknown setting {key!r}")
        settings[key] = value
    return settings


def _assign(values: dict[str, Any], endpoint_values: dict[str, Any], dotted: str, value: Any) -> None:
    if dotted.startswith("endpoints."):
        endpoint_values[dotted.split(".", 1)[1]] = value
    else:
        values[dotted] = value


def load_config(
    config_file: Path | str | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> PipelineConfig:
    """Assemble a PipelineConfig.

    overrides (typically CLI flags) win over environment variables, which
    win over the config file, which wins over defaults. Secrets are read
    from the environment only.
    """
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    endpoint_values: dict[str, Any] = {}

    if config_file is not None:
        for key, raw in parse_config_file(config_file).items():
            dotted, cast = _FILE_KEYS[key]
            _assign(values, endpoint_values, dotted, cast(raw))

    for env_key, dotted in _ENV_KEYS.items():
        if env.get(env_key):
            _assign(values, endpoint_values, dotted, env[env_key])

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in _ENDPOINT_FIELDS:
            endpoint_values[key] = value
        elif key in _CONFIG_FIELDS:
            values[key] = value
        else:
            raise ValueError(f"unknown config override: {key!r}")

    values["endpoints"] = BackendEndpoints(**endpoint_values)
    return PipelineConfig(**values)
