from __future__ import annotations

import json
import threading
from decimal import Decimal
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from foamgpt.llm import (
    BackendConfig,
    BackendTimeout,
    ChatRequest,
    ContextOverflow,
    HttpBackend,
    HttpStatus,
    MalformedResponse,
    Message,
    MissingApiKey,
    Pricing,
    ScriptExhausted,
    UsageTotals,
    compute_cost,
    default_pricing,
    estimate_request,
    estimate_tokens,
    find_pricing,
    format_usd,
    make_backend,
    pricing_for,
    send_chat,
)
from foamgpt.llm.pricing import parse_context, usd_to_micro

from conftest import scripted

TABLE = default_pricing()


def http_cfg(base="http://stub.test", **kw) -> BackendConfig:
    return BackendConfig(kind="http", model="gpt-4o", base_url=base, **kw)


def completion(content="ok", prompt=10, completion_tokens=3) -> dict:
    return {"model": "gpt-4o", "choices": [{"message": {"role": "assistant", "content": content},
                                            "finish_reason": "stop"}],
            "usage": {"prompt_tokens": prompt, "completion_tokens": completion_tokens}}


def request(text="hello") -> ChatRequest:
    return ChatRequest(model="gpt-4o", messages=(Message("system", "sys"), Message("user", text)))


# -- tokens and pricing

def test_estimate_tokens_is_ceil_bytes_over_four():
    assert estimate_tokens("") == 0
    assert estimate_tokens("abcd") == 1
    assert estimate_tokens("abcde") == 2
    assert estimate_tokens("é") == 1  # two UTF-8 bytes


@given(st.text())
def test_estimate_tokens_bounds(text):
    n = len(text.encode("utf-8"))
    assert estimate_tokens(text) == -(-n // 4)


def test_estimate_request_sums_messages():
    assert estimate_request(request("abcdefgh")) == estimate_tokens("sys") + 2


def test_context_parsing():
    assert parse_context("32k") == 32768
    assert parse_context("64K") == 65536
    assert parse_context(4096) == 4096


def test_usd_to_micro_rejects_sub_micro():
    assert usd_to_micro("0.035") == 35000
    with pytest.raises(ValueError):
        usd_to_micro("0.0000001")


@pytest.mark.parametrize("model, micro", [
    ("gpt-4o", 12_500_000), ("o1", 75_000_000), ("deepseek-v3", 585_000), ("qwen-max", 2_000_000),
])
def test_million_million_costs(model, micro):
    row = find_pricing(model, TABLE)
    assert compute_cost(UsageTotals(10**6, 10**6), row) == micro


def test_cost_rounds_half_up_per_term():
    row = Pricing("m", input_per_million=1, output_per_million=1, context_length=1000)
    assert compute_cost(UsageTotals(500_000, 499_999), row) == 1  # 0.5 -> 1, 0.499999 -> 0


def test_aliases_and_unknown_models():
    assert find_pricing("DeepSeek-V3", TABLE).model == "deepseek-v3"
    assert find_pricing("Qwen 2.5-Max", TABLE).model == "qwen-max"
    assert find_pricing("llama", TABLE) is None
    row = pricing_for("llama", TABLE)
    assert row.unpriced and compute_cost(UsageTotals(5, 5), row) == 0


def test_format_usd():
    assert format_usd(75_000_000) == "$75.000000"
    assert format_usd(585_000) == "$0.585000"
    assert format_usd(0) == "$0"


# -- request types

def test_wire_payload():
    payload = request().wire_payload()
    assert payload["messages"][0] == {"role": "system", "content": "sys"}
    assert payload["temperature"] == 0
    json.dumps(payload)


def test_system_message_only_first():
    with pytest.raises(ValueError):
        ChatRequest(model="m", messages=(Message("user", "a"), Message("system", "b")))


def test_backend_config_validation():
    with pytest.raises(ValueError):
        BackendConfig.from_json({"kind": "http", "model": "m"})
    with pytest.raises(ValueError):
        BackendConfig.from_json({"kind": "scripted", "model": "m"})
    cfg = BackendConfig.from_json({"kind": "http", "model": "m", "base_url": "http://x",
                                   "temperature": 0.2}, name="local")
    assert cfg.label == "local" and cfg.temperature == Decimal("0.2")


# -- scripted backend

def test_scripted_replays_in_order_then_exhausts():
    be = scripted(["one", "two"])
    assert send_chat(be, request()).content == "one"
    assert send_chat(be, request()).content == "two"
    assert be.remaining == 0
    with pytest.raises(ScriptExhausted):
        send_chat(be, request())


def test_scripted_usage_is_estimated():
    resp = scripted(["abcdefgh"]).complete(request("x"))
    assert resp.usage == UsageTotals(estimate_request(request("x")), 2)


def test_context_overflow_is_checked_before_sending():
    be = scripted(["never"], model="qwen-max")
    with pytest.raises(ContextOverflow):
        send_chat(be, request("x" * (4 * 32768 + 4)))
    assert be.remaining == 1


def test_make_backend_reads_script(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(["a"]))
    cfg = BackendConfig(kind="scripted", model="o1", script_path=str(path))
    be = make_backend(cfg, TABLE)
    assert be.pricing.model == "o1" and be.remaining == 1
    path.write_text(json.dumps({"not": "a list"}))
    with pytest.raises(ValueError):
        make_backend(cfg, TABLE)


def test_missing_api_key(monkeypatch):
    monkeypatch.delenv("FOAMGPT_TEST_KEY", raising=False)
    with pytest.raises(MissingApiKey):
        make_backend(http_cfg(api_key_env="FOAMGPT_TEST_KEY"), TABLE)


# -- http backend over a mock transport

def mock_backend(handler, sleeps=None) -> HttpBackend:
    return HttpBackend(http_cfg(), pricing_for("gpt-4o", TABLE), api_key="k",
                       transport=httpx.MockTransport(handler),
                       sleep=(sleeps.append if sleeps is not None else lambda s: None))


def test_http_success_uses_reported_usage():
    seen = []

    def handler(req):
        seen.append(req)
        return httpx.Response(200, json=completion("hi", 11, 4))

    resp = mock_backend(handler).complete(request())
    assert resp.content == "hi" and resp.usage == UsageTotals(11, 4)
    assert str(seen[0].url) == "http://stub.test/v1/chat/completions"
    assert seen[0].headers["authorization"] == "Bearer k"


def test_http_retries_once_on_5xx_with_identical_body():
    bodies, sleeps = [], []

    def handler(req):
        bodies.append(req.content)
        return httpx.Response(503 if len(bodies) == 1 else 200, json=completion())

    mock_backend(handler, sleeps).complete(request())
    assert len(bodies) == 2 and bodies[0] == bodies[1]
    assert sleeps == [2]


def test_http_second_5xx_raises():
    with pytest.raises(HttpStatus) as info:
        mock_backend(lambda req: httpx.Response(500, text="boom")).complete(request())
    assert info.value.code == 500


def test_http_4xx_is_not_retried():
    calls = []

    def handler(req):
        calls.append(1)
        return httpx.Response(401, text="bad key")

    with pytest.raises(HttpStatus):
        mock_backend(handler).complete(request())
    assert calls == [1]


def test_http_timeout_retried_then_raised():
    calls = []

    def handler(req):
        calls.append(1)
        raise httpx.ReadTimeout("slow", request=req)

    with pytest.raises(BackendTimeout):
        mock_backend(handler).complete(request())
    assert len(calls) == 2


@pytest.mark.parametrize("payload", [{"choices": []}, {"nope": 1}, "not json"])
def test_http_malformed(payload):
    def handler(req):
        if isinstance(payload, str):
            return httpx.Response(200, text=payload)
        return httpx.Response(200, json=payload)

    with pytest.raises(MalformedResponse):
        mock_backend(handler).complete(request())


# -- http backend against a real local server

class _Stub(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        self.server.requests.append((self.path, body))
        data = json.dumps(completion(f"echo {body['messages'][-1]['content']}")).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Stub)
    server.requests = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()
    server.server_close()


def test_http_against_stub_server(stub_server):
    host, port = stub_server.server_address
    be = make_backend(http_cfg(base=f"http://{host}:{port}/"), TABLE)
    resp = send_chat(be, request("ping"))
    assert resp.content == "echo ping"
    path, body = stub_server.requests[0]
    assert path == "/v1/chat/completions"
    assert body["model"] == "gpt-4o" and body["messages"][1]["content"] == "ping"
