"""Deployment configuration: JSON file, overridden by MINIFRAG_* env vars.

The CLI and the server read the same format, so a config written for one
drives the other.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .llm import ProviderConfig

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8787


@dataclass
class AppConfig:
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    store_dir: Path = Path("artifacts")
    max_attempts: int = 3
    workers: int = 2
    host: str = DEFAULT_HOST
    port: int = DEFAULT_PORT
    static_dir: Path | None = None
    template_dir: Path | None = None


class ConfigError(ValueError):
    pass


def load_config(path: Path | None = None, env: dict | None = None) -> AppConfig:
    """Resolve configuration: defaults <- file <- environment."""
    env = os.environ if env is None else env
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        except ValueError as err:
            raise ConfigError(f"config {path} is not valid JSON: {err}") from err

    provider_data = dict(data.get("provider", {}))
    if "fixtures" in provider_data and provider_data["fixtures"] is not None:
        provider_data["fixtures"] = Path(provider_data["fixtures"])

    for env_key, field_name in (
        ("MINIFRAG_PROVIDER", "kind"),
        ("MINIFRAG_ENDPOINT", "endpoint"),
        ("MINIFRAG_MODEL", "model"),
        ("MINIFRAG_API_KEY", "api_key"),
    ):
        if env.get(env_key):
            provider_data[field_name] = env[env_key]
    if env.get("MINIFRAG_FIXTURES"):
        provider_data["fixtures"] = Path(env["MINIFRAG_FIXTURES"])

    try:
        provider = ProviderConfig(**provider_data)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"invalid provider config: {err}") from err

    cfg = AppConfig(
        provider=provider,
        store_dir=Path(data.get("store_dir", "artifacts")),
        max_attempts=int(data.get("max_attempts", 3)),
        workers=int(data.get("workers", 2)),
        host=data.get("host", DEFAULT_HOST),
        port=int(data.get("port", DEFAULT_PORT)),
        static_dir=Path(data["static_dir"]) if data.get("static_dir") else None,
        template_dir=Path(data["template_dir"]) if data.get("template_dir") else None,
    )

    if env.get("MINIFRAG_STORE"):
        cfg.store_dir = Path(env["MINIFRAG_STORE"])
    if env.get("MINIFRAG_HOST"):
        cfg.host = env["MINIFRAG_HOST"]
    if env.get("MINIFRAG_PORT"):
        cfg.port = int(env["MINIFRAG_PORT"])
    if env.get("MINIFRAG_MAX_ATTEMPTS"):
        cfg.max_attempts = int(env["MINIFRAG_MAX_ATTEMPTS"])
    if env.get("MINIFRAG_STATIC_DIR"):
        cfg.static_dir = Path(env["MINIFRAG_STATIC_DIR"])
    return cfg
