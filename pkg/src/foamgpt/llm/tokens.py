"""Token estimates used for budgeting and for synthesized scripted usage."""

from __future__ import annotations

from typing import Iterable


def estimate_tokens(text: str) -> int:
    """ceil(utf-8 bytes / 4); zero only for the empty string."""
    n = len(text.encode("utf-8"))
    return (n + 3) // 4


def estimate_messages(contents: Iterable[str]) -> int:
    return sum(estimate_tokens(c) for c in contents)


def estimate_request(req) -> int:
    return estimate_messages(m.content for m in req.messages)
