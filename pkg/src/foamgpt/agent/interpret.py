"""Extract files from a model reply that follows the FILE: protocol."""

from __future__ import annotations

import logging
import re

from ..case.tree import normalize_path

log = logging.getLogger(__name__)

_HEADER = re.compile(r"^\s*[*#>`_ ]*FILE:\s*`?([^`*\s]+)`?[*_ ]*\s*$", re.IGNORECASE)
_FENCE = re.compile(r"^\s*(`{3,}|~{3,})")
_PATH_COMMENT = re.compile(r"^\s*//\s*([\w.+-]+(?:/[\w.+-]+)+)\s*$")


class NoFilesFound(ValueError):
    """The reply held no FILE blocks; the caller retries with a format reminder."""


def _path_or_none(raw: str):
    try:
        return normalize_path(raw)
    except ValueError:
        log.warning("ignoring file block with unusable path %r", raw)
        return None


def interpret_files(response: str) -> list[tuple[str, str]]:
    """Files in order of first appearance; a repeated path keeps its last content."""
    lines = response.splitlines()
    found: dict[str, str] = {}
    pending = None
    i = 0
    while i < len(lines):
        line = lines[i]
        header = _HEADER.match(line)
        if header:
            pending = header.group(1)
            i += 1
            continue
        fence = _FENCE.match(line)
        if fence:
            marker = fence.group(1)
            body = []
            i += 1
            while i < len(lines) and not lines[i].strip().startswith(marker):
                body.append(lines[i])
                i += 1
            i += 1  # closing fence (or end of text)
            path = pending
            if path is None and body:
                m = _PATH_COMMENT.match(body[0])
                if m:
                    path, body = m.group(1), body[1:]
            pending = None
            if path is not None:
                norm = _path_or_none(path)
                if norm is not None:
                    found[norm] = "\n".join(body) + "\n"
            continue
        if line.strip():
            pending = None
        i += 1
    if not found:
        raise NoFilesFound("no FILE blocks in response")
    return list(found.items())
