"""Effective configuration for the CLI and service.

Values merge with precedence: built-in defaults < config file < environment
variables < explicit flags. The config file is ``litfetch.toml`` in the
working directory, a flat key-value document: one ``key = value`` per
line, values optionally double-quoted, ``#`` starts a comment, booleans
are ``true``/``false``. (No tables, no nesting.)
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path

from .cache import FileCache
from .coci import DEFAULT_COCI_URL, CociClient
from .crossref import DEFAULT_API_URL, DEFAULT_RESOLVER_URL, CrossrefClient
from .http import ClientPolicy

logger = logging.getLogger(__name__)

CONFIG_FILENAME = "litfetch.toml"

ENV_VARS = {
    "LITFETCH_EMAIL": "contact_email",
    "LITFETCH_CACHE_DIR": "cache_dir",
    "LITFETCH_CROSSREF_URL": "crossref_url",
    "LITFETCH_COCI_URL": "coci_url",
    "LITFETCH_RESOLVER_URL": "resolver_url",
}

_BOOL_KEYS = {"continue_on_error", "cache_only"}
_INT_KEYS = {"parallelism", "max_retries", "max_page_size"}
_FLOAT_KEYS = {"min_request_interval", "request_timeout", "initial_backoff"}


@dataclass(frozen=True)
class Config:
    contact_email: str | None = None
    cache_dir: str | None = None
    crossref_url: str = DEFAULT_API_URL
    coci_url: str = DEFAULT_COCI_URL
    resolver_url: str = DEFAULT_RESOLVER_URL
    parallelism: int = 1
    continue_on_error: bool = False
    output_dir: str = "."
    cache_only: bool = False  # replay mode: serve everything from cache
    max_page_size: int = 100
    max_retries: int = 3
    min_request_interval: float | None = None
    request_timeout: float = 30.0
    initial_backoff: float = 1.0

    def echo(self) -> dict:
        """The search-relevant effective settings, echoed into reports."""
        return {
            "polite": bool(self.contact_email),
            "parallelism": self.parallelism,
            "continue_on_error": self.continue_on_error,
        }


def parse_config_file(text: str) -> dict:
    """Parse the flat key-value grammar described in the module docstring."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{CONFIG_FILENAME}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] == '"':
            value = value[1:-1]
        if key in _BOOL_KEYS:
            if value.lower() not in ("true", "false"):
                raise ValueError(f"{CONFIG_FILENAME}:{lineno}: {key} must be true or false")
            values[key] = value.lower() == "true"
        elif key in _INT_KEYS:
            values[key] = int(value)
        elif key in _FLOAT_KEYS:
            values[key] = float(value)
        else:
            values[key] = value
    return values


def load_config(
    cwd: str | Path | None = None,
    env: dict | None = None,
    overrides: dict | None = None,
) -> Config:
    """Merge defaults, config file, environment, and flag overrides."""
    env = os.environ if env is None else env
    config = Config()

    path = Path(cwd or ".") / CONFIG_FILENAME
    if path.exists():
        file_values = parse_config_file(path.read_text("utf-8"))
        known = {k: v for k, v in file_values.items() if hasattr(config, k)}
        unknown = set(file_values) - set(known)
        if unknown:
            logger.warning("ignoring unknown config keys: %s", ", ".join(sorted(unknown)))
        config = replace(config, **known)

    env_values = {field: env[var] for var, field in ENV_VARS.items() if env.get(var)}
    if env_values:
        config = replace(config, **env_values)

    if overrides:
        config = replace(config, **{k: v for k, v in overrides.items() if v is not None})
    return config


def build_policy(config: Config) -> ClientPolicy:
    return ClientPolicy(
        contact_email=config.contact_email,
        max_page_size=config.max_page_size,
        max_retries=config.max_retries,
        initial_backoff=config.initial_backoff,
        request_timeout=config.request_timeout,
        min_request_interval=config.min_request_interval,
    )


def build_cache(config: Config) -> FileCache | None:
    return FileCache(config.cache_dir) if config.cache_dir else None


def build_crossref(config: Config, cache: FileCache | None = None) -> CrossrefClient:
    return CrossrefClient(
        base_url=config.crossref_url,
        resolver_url=config.resolver_url,
        policy=build_policy(config),
        cache=cache,
        cache_only=config.cache_only,
    )


def build_coci(config: Config, cache: FileCache | None = None) -> CociClient:
    return CociClient(
        base_url=config.coci_url,
        policy=build_policy(config),
        cache=cache,
        cache_only=config.cache_only,
    )
