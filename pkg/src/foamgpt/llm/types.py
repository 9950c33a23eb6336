"""Chat request/response values, usage totals, pricing rows and backend configs."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class Message:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")

    def to_json(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[Message, ...]
    temperature: Decimal = Decimal("0")
    max_output_tokens: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("a chat request needs at least one message")
        if any(m.role == "system" for m in self.messages[1:]):
            raise ValueError("the system prompt must be the first message")

    def wire_payload(self) -> dict:
        payload: dict = {
            "model": self.model,
            "messages": [m.to_json() for m in self.messages],
            "temperature": float(self.temperature),
        }
        if self.max_output_tokens is not None:
            payload["max_tokens"] = self.max_output_tokens
        return payload


@dataclass(frozen=True)
class UsageTotals:
    input_tokens: int = 0
    output_tokens: int = 0

    def __post_init__(self) -> None:
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ValueError("token counts must be non-negative")

    @property
    def total(self) -> int:
        return self.input_tokens + self.output_tokens

    def __add__(self, other: "UsageTotals") -> "UsageTotals":
        return UsageTotals(self.input_tokens + other.input_tokens,
                           self.output_tokens + other.output_tokens)


@dataclass(frozen=True)
class ChatResponse:
    content: str
    usage: UsageTotals
    model: str
    finish_reason: str = "stop"


@dataclass(frozen=True)
class Pricing:
    """Prices are integer micro-USD per million tokens."""

    model: str
    input_per_million: int
    output_per_million: int
    context_length: int
    aliases: tuple[str, ...] = ()
    unpriced: bool = False

    def __post_init__(self) -> None:
        if self.input_per_million < 0 or self.output_per_million < 0:
            raise ValueError("prices must be non-negative")
        if self.context_length <= 0:
            raise ValueError("context_length must be positive")

    def matches(self, name: str) -> bool:
        wanted = name.lower()
        return wanted == self.model.lower() or wanted in (a.lower() for a in self.aliases)


KINDS = ("http", "scripted")


@dataclass(frozen=True)
class BackendConfig:
    kind: str
    model: str
    base_url: Optional[str] = None
    api_key_env: Optional[str] = None
    timeout_seconds: int = 300
    script_path: Optional[str] = None
    name: Optional[str] = None
    temperature: Decimal = field(default=Decimal("0"))

    @property
    def label(self) -> str:
        return self.name or self.model

    def validate(self) -> None:
        from .errors import UnknownKind

        if self.kind not in KINDS:
            raise UnknownKind(self.kind)
        if self.kind == "http":
            if not self.base_url:
                raise ValueError(f"http backend {self.label} needs base_url")
            if self.script_path:
                raise ValueError(f"http backend {self.label} must not set script_path")
        else:
            if not self.script_path:
                raise ValueError(f"scripted backend {self.label} needs script_path")
            if self.base_url or self.api_key_env:
                raise ValueError(f"scripted backend {self.label} takes no base_url or api_key_env")

    @classmethod
    def from_json(cls, obj: dict, name: Optional[str] = None) -> "BackendConfig":
        known = {"kind", "model", "base_url", "api_key_env", "timeout_seconds", "script_path",
                 "name", "temperature"}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown backend config keys: {sorted(extra)}")
        kwargs = dict(obj)
        if "temperature" in kwargs:
            kwargs["temperature"] = Decimal(str(kwargs["temperature"]))
        kwargs.setdefault("name", name)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg
