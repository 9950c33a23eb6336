"""Compose file requests within a token budget."""

from __future__ import annotations

import math
from typing import Optional, Sequence

from ..case import CaseTree, IterationLimits, ParsedFile, TaskSpec
from ..foamdict import FormatStyle, serialize_foam_file
from ..llm import ChatRequest, Message, Pricing, estimate_tokens
from .prompts import FORMAT_REMINDER, GENERATE_INSTRUCTION, RETRY_INSTRUCTION, load_prompt
from .types import ErrorReport, ExecutionPlan

_COMPACT = FormatStyle(banner=False)
_TRUNCATED = "[... truncated ...]"

MESH_NAMES = ("blockMeshDict", "snappyHexMeshDict", "extrudeMeshDict", "surfaceFeatureExtractDict")


class BudgetImpossible(ValueError):
    """Even the minimal request exceeds the token budget."""

    unrecoverable = True


def budget_tokens(pricing: Pricing, limits: IterationLimits) -> int:
    return math.floor(limits.token_budget_fraction * pricing.context_length)


def drop_rank(path: str) -> int:
    """Lower ranks are dropped first when over budget."""
    name = path.rsplit("/", 1)[-1]
    if name in MESH_NAMES or "/polyMesh/" in path:
        return 0
    if name == "fvSchemes":
        return 1
    return 2


def implicated_file(case: CaseTree, err: Optional[ErrorReport]) -> Optional[str]:
    """The case file an error points at: a path quoted in the excerpt, a file
    named like the keyword, or a dictionary mentioning the keyword."""
    if err is None:
        return None
    mentioned = [p for p in case if p in err.excerpt]
    if mentioned:
        return max(mentioned, key=len)
    kw = err.keyword
    if not kw:
        return None
    for path in case:
        if path.rsplit("/", 1)[-1] == kw:
            return path
    for path in case:
        text = case.text_of(path)
        if text is not None and isinstance(case.get(path), ParsedFile) and kw in text:
            return path
    return None


def file_block(path: str, text: str) -> str:
    return f"FILE: {path}\n```\n{text.rstrip(chr(10))}\n```\n"


def _case_texts(case: CaseTree) -> tuple[list[tuple[str, str]], list[str]]:
    texts, opaque = [], []
    for path, entry in case.entries.items():
        if isinstance(entry, ParsedFile):
            texts.append((path, serialize_foam_file(entry.foam, _COMPACT)))
        else:
            opaque.append(path)
    return texts, opaque


def _user_text(description: str, files: Sequence[tuple[str, str]], opaque: Sequence[str],
               dropped: Sequence[str], err: Optional[ErrorReport], excerpt: str,
               plan: Optional[ExecutionPlan], reminder: bool, context: Sequence[str]) -> str:
    parts = [f"Task:\n{description}\n"]
    for doc in context:
        parts.append(f"Reference:\n{doc}\n")
    if plan is not None:
        parts.append(f"Solver: {plan.solver}. Commands: {', '.join(str(c) for c in plan.commands)}.")
        if plan.files_to_generate:
            parts.append("Files expected: " + ", ".join(plan.files_to_generate) + ".\n")
    if files:
        parts.append("Current case files:\n")
        parts.extend(file_block(p, t) for p, t in files)
    if opaque:
        parts.append("Present but not shown (binary or mesh data): " + ", ".join(opaque) + ".")
    if dropped:
        parts.append("Omitted to fit the context window, unchanged: " + ", ".join(dropped) + ".")
    if err is not None:
        parts.append(f"\nThe last attempt failed at {err.command or 'validation'} ({err.source}):\n"
                     f"```\n{excerpt}\n```\n{RETRY_INSTRUCTION}")
    else:
        parts.append("\n" + GENERATE_INSTRUCTION)
    if reminder:
        parts.append(FORMAT_REMINDER)
    return "\n".join(parts) + "\n"


def _shorten(excerpt: str, keep: int, max_chars: Optional[int] = None) -> str:
    lines = excerpt.splitlines()
    text = excerpt if keep >= len(lines) else "\n".join(lines[:keep] + [_TRUNCATED])
    if max_chars is not None and len(text) > max_chars:
        text = text[:max_chars] + _TRUNCATED
    return text


def compose_request(
    task: TaskSpec,
    case: CaseTree,
    err: Optional[ErrorReport],
    pricing: Pricing,
    limits: Optional[IterationLimits] = None,
    *,
    plan: Optional[ExecutionPlan] = None,
    system_prompt: Optional[str] = None,
    reminder: bool = False,
    context: Sequence[str] = (),
    model: Optional[str] = None,
) -> ChatRequest:
    limits = limits or task.limits
    budget = budget_tokens(pricing, limits)
    system = system_prompt if system_prompt is not None else load_prompt("system")
    files, opaque = _case_texts(case)
    keep_last = implicated_file(case, err)

    sizes = dict(files)
    # stable drop order: rank, then largest first, then path
    order = sorted(
        (p for p in sizes if p != keep_last),
        key=lambda p: (drop_rank(p), -len(sizes[p]), p),
    )
    excerpt_lines = len(err.excerpt.splitlines()) if err else 0

    def build(dropped: Sequence[str], keep_lines: int,
              max_chars: Optional[int] = None) -> tuple[ChatRequest, int]:
        shown = [(p, t) for p, t in files if p not in dropped]
        excerpt = _shorten(err.excerpt, keep_lines, max_chars) if err else ""
        user = _user_text(task.description, shown, opaque, dropped, err, excerpt, plan,
                          reminder, context)
        req = ChatRequest(model=model or pricing.model, messages=(Message("system", system),
                                                         Message("user", user)))
        return req, estimate_tokens(system) + estimate_tokens(user)

    dropped: list[str] = []
    req, used = build(dropped, excerpt_lines)
    for path in order:
        if used <= budget:
            return req
        dropped.append(path)
        req, used = build(dropped, excerpt_lines)
    keep = excerpt_lines
    while used > budget and keep > 1:
        keep = max(1, keep // 2)
        req, used = build(dropped, keep)
    chars = len(err.excerpt) if err else 0
    while used > budget and chars > 80:
        chars //= 2
        req, used = build(dropped, keep, chars)
    if used > budget and keep_last in sizes:
        dropped.append(keep_last)
        req, used = build(dropped, keep, chars if err else None)
    if used > budget:
        raise BudgetImpossible(f"minimal request needs ~{used} tokens, budget is {budget}")
    return req


def compose_retry(task: TaskSpec, current_case: CaseTree, err: ErrorReport, pricing: Pricing,
                  limits: Optional[IterationLimits] = None, **kwargs) -> ChatRequest:
    if err is None:
        raise ValueError("compose_retry needs an error report")
    return compose_request(task, current_case, err, pricing, limits, **kwargs)
