"""Chat backends, token estimates and cost accounting."""

from .backends import HttpBackend, ScriptedBackend, make_backend, read_script, send_chat
from .errors import (
    BackendError,
    BackendTimeout,
    ContextOverflow,
    HttpStatus,
    MalformedResponse,
    MissingApiKey,
    ScriptExhausted,
    UnknownKind,
)
from .pricing import (
    compute_cost,
    default_pricing,
    find_pricing,
    format_usd,
    load_pricing,
    pricing_for,
)
from .tokens import estimate_request, estimate_tokens
from .types import BackendConfig, ChatRequest, ChatResponse, Message, Pricing, UsageTotals

__all__ = [
    "BackendConfig",
    "BackendError",
    "BackendTimeout",
    "ChatRequest",
    "ChatResponse",
    "ContextOverflow",
    "HttpBackend",
    "HttpStatus",
    "MalformedResponse",
    "Message",
    "MissingApiKey",
    "Pricing",
    "ScriptExhausted",
    "ScriptedBackend",
    "UnknownKind",
    "UsageTotals",
    "compute_cost",
    "default_pricing",
    "estimate_request",
    "estimate_tokens",
    "find_pricing",
    "format_usd",
    "load_pricing",
    "make_backend",
    "pricing_for",
    "read_script",
    "send_chat",
]
