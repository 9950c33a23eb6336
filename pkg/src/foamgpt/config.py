"""Application config: backends, pricing, runner and loop limits from JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Optional, Union

from .case import IterationLimits
from .llm import BackendConfig, Pricing, default_pricing, load_pricing
from .llm.pricing import pricing_from_json

DEFAULT_CONFIG_NAME = "foamgpt.json"

# Endpoints speaking the OpenAI chat-completions wire format. Keys come only
# from the named environment variables.
DEFAULT_BACKENDS = {
    "gpt-4o": {"kind": "http", "model": "gpt-4o", "base_url": "https://api.openai.com",
               "api_key_env": "OPENAI_API_KEY"},
    "o1": {"kind": "http", "model": "o1", "base_url": "https://api.openai.com",
           "api_key_env": "OPENAI_API_KEY"},
    "deepseek-v3": {"kind": "http", "model": "deepseek-chat", "base_url": "https://api.deepseek.com",
                    "api_key_env": "DEEPSEEK_API_KEY"},
    "qwen-max": {"kind": "http", "model": "qwen-max",
                 "base_url": "https://dashscope-intl.aliyuncs.com/compatible-mode",
                 "api_key_env": "DASHSCOPE_API_KEY"},
    "local": {"kind": "http", "model": "qwen2.5", "base_url": "http://localhost:11434"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AppConfig:
    pricing_table: tuple[Pricing, ...] = field(default_factory=lambda: tuple(default_pricing()))
    backends: dict = field(default_factory=dict)
    default_backend: str = "qwen-max"
    runner: str = "mock"
    system_prompt_path: Optional[Path] = None
    limits: IterationLimits = field(default_factory=IterationLimits)

    def __post_init__(self) -> None:
        if self.default_backend not in self.backends:
            raise ConfigError(f"default_backend {self.default_backend!r} is not a configured backend")
        if self.runner not in ("mock", "real"):
            raise ConfigError(f"runner must be mock or real, got {self.runner!r}")

    def backend(self, name: str) -> BackendConfig:
        try:
            return self.backends[name]
        except KeyError:
            raise ConfigError(
                f"unknown backend {name!r}; configured: {', '.join(sorted(self.backends))}") from None


def _backends(obj: dict) -> dict:
    return {name: BackendConfig.from_json(cfg, name=name) for name, cfg in obj.items()}


def load_config(path: Optional[Union[str, Path]] = None) -> AppConfig:
    """Read ``path``, else ``./foamgpt.json`` when present, else built-in defaults.

    Backends from the file are added to the built-in ones (same name replaces).
    """
    doc: dict = {}
    base = Path.cwd()
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
    else:
        p = Path(DEFAULT_CONFIG_NAME)
    if p.is_file():
        try:
            doc = json.loads(p.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}:{exc.lineno}: {exc.msg}") from None
        base = p.resolve().parent
    known = {"pricing", "backends", "default_backend", "runner", "system_prompt_path", "limits"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        backends = _backends(DEFAULT_BACKENDS)
        backends.update(_backends(doc.get("backends", {})))
        pricing = doc.get("pricing")
        if pricing is None:
            table = tuple(default_pricing())
        elif isinstance(pricing, str):
            table = tuple(load_pricing(base / pricing))
        else:
            table = tuple(pricing_from_json(row) for row in pricing)
        lim = doc.get("limits", {})
        limits = IterationLimits(
            max_iterations=int(lim.get("max_iterations", 20)),
            per_run_wall_seconds=int(lim.get("per_run_wall_seconds", 600)),
            token_budget_fraction=Decimal(str(lim.get("token_budget_fraction", "0.8"))),
        )
        prompt = doc.get("system_prompt_path")
        return AppConfig(
            pricing_table=table,
            backends=backends,
            default_backend=doc.get("default_backend", "qwen-max"),
            runner=doc.get("runner", "mock"),
            system_prompt_path=(base / prompt) if prompt else None,
            limits=limits,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid config: {exc}") from None
