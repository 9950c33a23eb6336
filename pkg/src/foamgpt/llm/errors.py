"""Backend error hierarchy."""

from __future__ import annotations


class BackendError(Exception):
    """Base for every failure raised by a chat backend."""

    # unrecoverable errors end a trial instead of consuming an iteration
    unrecoverable = False


class BackendTimeout(BackendError):
    pass


class HttpStatus(BackendError):
    def __init__(self, code: int, body: str) -> None:
        super().__init__(f"HTTP {code}: {body[:200]}")
        self.code = code
        self.body = body[:2000]


class MalformedResponse(BackendError):
    pass


class ContextOverflow(BackendError):
    unrecoverable = True

    def __init__(self, estimated: int, limit: int) -> None:
        super().__init__(f"request needs ~{estimated} tokens, context window is {limit}")
        self.estimated = estimated
        self.limit = limit


class ScriptExhausted(BackendError):
    unrecoverable = True


class MissingApiKey(BackendError):
    unrecoverable = True

    def __init__(self, env_var: str) -> None:
        super().__init__(f"environment variable {env_var} is not set")
        self.env_var = env_var


class UnknownKind(BackendError):
    unrecoverable = True

    def __init__(self, kind: str) -> None:
        super().__init__(f"unknown backend kind {kind!r}; expected http or scripted")
        self.kind = kind
