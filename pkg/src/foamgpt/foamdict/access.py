"""Slash-separated path access into a FoamFile body."""

from __future__ import annotations

from dataclasses import replace

from .ast import Dict, FoamFile, FoamValue


class NotFound(KeyError):
    def __init__(self, path: str) -> None:
        super().__init__(path)
        self.path = path

    def __str__(self) -> str:
        return f"entry not found: {self.path}"


class NotADict(TypeError):
    def __init__(self, prefix: str) -> None:
        super().__init__(f"not a dictionary: {prefix}")
        self.prefix = prefix


def split_path(path: str) -> list[str]:
    parts = [p for p in path.split("/") if p]
    if not parts:
        raise ValueError("empty keyword path")
    return parts


def lookup(d: Dict, path: str) -> FoamValue:
    node: FoamValue = d
    parts = split_path(path)
    for i, key in enumerate(parts):
        if not isinstance(node, Dict):
            raise NotADict("/".join(parts[:i]))
        if key not in node:
            raise NotFound(path)
        node = node[key]
    return node


def get_entry(f: FoamFile, path: str) -> FoamValue:
    return lookup(f.body, path)


def _assign(d: Dict, parts: list[str], value: FoamValue, done: list[str]) -> Dict:
    key = parts[0]
    if len(parts) == 1:
        return d.set(key, value)
    child = d.get(key)
    if child is None:
        child = Dict()
    elif not isinstance(child, Dict):
        raise NotADict("/".join(done + [key]))
    return d.set(key, _assign(child, parts[1:], value, done + [key]))


def set_in(d: Dict, path: str, value: FoamValue) -> Dict:
    return _assign(d, split_path(path), value, [])


def set_entry(f: FoamFile, path: str, value: FoamValue) -> FoamFile:
    """Return a copy of ``f`` with ``path`` set; missing dictionaries are created."""
    return replace(f, body=set_in(f.body, path, value))
