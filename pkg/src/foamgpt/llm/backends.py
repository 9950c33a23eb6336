"""Chat backends: OpenAI-style HTTP endpoints and a deterministic scripted replay."""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence, Union

import httpx

from .errors import (
    BackendTimeout,
    ContextOverflow,
    HttpStatus,
    MalformedResponse,
    MissingApiKey,
    ScriptExhausted,
    UnknownKind,
)
from .pricing import pricing_for
from .tokens import estimate_request, estimate_tokens
from .types import BackendConfig, ChatRequest, ChatResponse, Pricing, UsageTotals

log = logging.getLogger(__name__)

RETRY_BACKOFF_SECONDS = 2.0


class Backend(Protocol):
    config: BackendConfig
    pricing: Pricing

    def complete(self, req: ChatRequest) -> ChatResponse: ...

    def clone(self) -> "Backend": ...


class HttpBackend:
    """POSTs to ``<base_url>/v1/chat/completions``. Safe to share across threads."""

    def __init__(
        self,
        config: BackendConfig,
        pricing: Pricing,
        api_key: Optional[str] = None,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config
        self.pricing = pricing
        self._api_key = api_key
        self._transport = transport
        self._sleep = sleep
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(
            timeout=config.timeout_seconds, headers=headers, transport=transport)

    @property
    def url(self) -> str:
        return self.config.base_url.rstrip("/") + "/v1/chat/completions"

    def clone(self) -> "HttpBackend":
        return self

    def close(self) -> None:
        self._client.close()

    def _post(self, body: bytes) -> httpx.Response:
        return self._client.post(self.url, content=body)

    def complete(self, req: ChatRequest) -> ChatResponse:
        # serialized once so a retry sends identical bytes
        body = json.dumps(req.wire_payload(), ensure_ascii=False).encode("utf-8")
        for attempt in (1, 2):
            try:
                resp = self._post(body)
            except httpx.TimeoutException as exc:
                if attempt == 2:
                    raise BackendTimeout(f"{self.url}: {exc}") from exc
                log.warning("timeout from %s, retrying in %ss", self.url, RETRY_BACKOFF_SECONDS)
                self._sleep(RETRY_BACKOFF_SECONDS)
                continue
            except httpx.HTTPError as exc:
                raise MalformedResponse(f"{self.url}: transport error {exc}") from exc
            if resp.status_code >= 500 and attempt == 1:
                log.warning("HTTP %s from %s, retrying", resp.status_code, self.url)
                self._sleep(RETRY_BACKOFF_SECONDS)
                continue
            if resp.status_code >= 400:
                raise HttpStatus(resp.status_code, resp.text)
            return self._parse(resp, req)
        raise AssertionError("unreachable")

    def _parse(self, resp: httpx.Response, req: ChatRequest) -> ChatResponse:
        try:
            data = resp.json()
            choice = data["choices"][0]
            content = choice["message"]["content"]
            usage = data.get("usage") or {}
            totals = UsageTotals(int(usage.get("prompt_tokens", 0)),
                                 int(usage.get("completion_tokens", 0)))
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(f"unexpected completion payload: {resp.text[:200]}") from exc
        if not isinstance(content, str):
            raise MalformedResponse("completion content is not a string")
        return ChatResponse(
            content=content,
            usage=totals,
            model=str(data.get("model") or req.model),
            finish_reason=str(choice.get("finish_reason") or "stop"),
        )


class ScriptedBackend:
    """Replays a fixed list of responses in order; single consumer.

    Usage is synthesized with estimate_tokens so runs are reproducible.
    """

    def __init__(self, config: BackendConfig, pricing: Pricing, responses: Sequence[str]) -> None:
        self.config = config
        self.pricing = pricing
        self.responses = tuple(responses)
        self._next = 0
        self._lock = threading.Lock()

    @property
    def remaining(self) -> int:
        return len(self.responses) - self._next

    def clone(self) -> "ScriptedBackend":
        return ScriptedBackend(self.config, self.pricing, self.responses)

    def complete(self, req: ChatRequest) -> ChatResponse:
        with self._lock:
            if self._next >= len(self.responses):
                raise ScriptExhausted(
                    f"script for {self.config.label} exhausted after {len(self.responses)} responses")
            content = self.responses[self._next]
            self._next += 1
        usage = UsageTotals(estimate_request(req), estimate_tokens(content))
        return ChatResponse(content=content, usage=usage, model=req.model)


def read_script(path: Union[str, Path]) -> list[str]:
    data = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise ValueError(f"{path}: a script must be a JSON array of strings")
    return data


def make_backend(
    cfg: BackendConfig,
    pricing_table: Sequence[Pricing],
    script_path: Optional[Union[str, Path]] = None,
    transport: Optional[httpx.BaseTransport] = None,
):
    """Bind ``cfg`` to its pricing row.

    ``script_path`` overrides ``cfg.script_path``; the bench harness uses it
    to pick a per-task script out of a script directory.
    """
    if cfg.kind not in ("http", "scripted"):
        raise UnknownKind(cfg.kind)
    pricing = pricing_for(cfg.model, pricing_table)
    if pricing.unpriced:
        log.warning("model %s has no pricing row; costs will be zero", cfg.model)
    if cfg.kind == "http":
        cfg.validate()
        key = None
        if cfg.api_key_env:
            key = os.environ.get(cfg.api_key_env)
            if not key:
                raise MissingApiKey(cfg.api_key_env)
        return HttpBackend(cfg, pricing, api_key=key, transport=transport)
    path = Path(script_path or cfg.script_path or "")
    if path.is_dir():
        raise ValueError(f"{path} is a script directory; pass the per-task script file")
    return ScriptedBackend(cfg, pricing, read_script(path))


def send_chat(backend, req: ChatRequest) -> ChatResponse:
    """Check the context window, then delegate to the backend."""
    estimated = estimate_request(req)
    limit = backend.pricing.context_length
    if estimated > limit:
        raise ContextOverflow(estimated, limit)
    return backend.complete(req)
