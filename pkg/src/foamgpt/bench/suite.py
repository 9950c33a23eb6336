"""Suite files: JSON task lists resolved against a fixtures directory."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import jsonschema

from ..case import IterationLimits, TaskSpec, assertion_from_json, load_case

EXPECTED_KEYS = ("expected_4o", "expected_o1", "expected_qwen", "expected_ds")

_ASSERTION = {
    "type": "object",
    "required": ["path", "op"],
    "properties": {
        "path": {"type": "string"},
        "key": {"type": "string"},
        "op": {"enum": ["equals", "endswith", "contains", "one_of", "exists", "exists_any",
                        "between", "file_exists"]},
        "value": {},
    },
    "additionalProperties": False,
}

SUITE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "tasks"],
    "properties": {
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "fixtures_root": {"type": "string"},
        "tasks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind", "description"],
                "properties": {
                    "id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
                    "label": {"type": "string"},
                    "kind": {"enum": ["generate", "modify"]},
                    "description": {"type": "string", "minLength": 1},
                    "baseline": {"type": "string"},
                    "provided_files": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["path", "source"],
                            "properties": {"path": {"type": "string"},
                                           "source": {"type": "string"}},
                            "additionalProperties": False,
                        },
                    },
                    "assertions": {
                        "type": "array",
                        "items": {
                            "oneOf": [
                                _ASSERTION,
                                {"type": "object", "required": ["any"],
                                 "properties": {"any": {"type": "array", "items": {
                                     "type": "array", "items": _ASSERTION}}},
                                 "additionalProperties": False},
                            ]
                        },
                    },
                    "solver_hint": {"type": "string"},
                    "max_iterations": {"type": "integer", "minimum": 1},
                    "oracle": {"type": "string"},
                    "published": {"type": "object"},
                    **{k: {"enum": ["pass", "fail", "not_tested"]} for k in EXPECTED_KEYS},
                },
                "additionalProperties": False,
                "if": {"properties": {"kind": {"const": "modify"}}},
                "then": {"required": ["baseline"]},
            },
        },
    },
    "additionalProperties": False,
}


class SchemaError(ValueError):
    def __init__(self, message: str, where: str = "") -> None:
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class MissingFixture(FileNotFoundError):
    def __init__(self, path: Path) -> None:
        super().__init__(f"fixture not found: {path}")
        self.path = path


@dataclass(frozen=True)
class Suite:
    name: str
    tasks: tuple[TaskSpec, ...]
    fixtures_root: Path
    # task id -> directory of known-good files for the scripted oracle
    oracles: dict = field(default_factory=dict)
    source_path: Optional[Path] = None

    def task(self, task_id: str) -> TaskSpec:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)

    def index(self, task_id: str) -> int:
        return [t.id for t in self.tasks].index(task_id)


def bundled_suite_path(name: str) -> Path:
    return Path(str(resources.files("foamgpt").joinpath(f"data/suites/{name}.suite.json")))


def _read_bytes(root: Path, source: str, dest: str) -> list[tuple[str, bytes]]:
    src = (root / source).resolve()
    if src.is_file():
        return [(dest, src.read_bytes())]
    if src.is_dir():
        return [(f"{dest}/{p.relative_to(src).as_posix()}", p.read_bytes())
                for p in sorted(src.rglob("*")) if p.is_file()]
    raise MissingFixture(src)


def load_suite(path: Union[str, Path]) -> Suite:
    path = Path(path)
    text = path.read_text("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, f"{path}:{exc.lineno}") from None
    try:
        jsonschema.validate(doc, SUITE_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(exc.message, f"{path}:{where}") from None

    root = (path.parent / doc.get("fixtures_root", ".")).resolve()
    tasks, oracles, seen = [], {}, set()
    for i, obj in enumerate(doc["tasks"]):
        tid = obj["id"]
        if tid in seen:
            raise SchemaError(f"duplicate task id {tid!r}", f"{path}:tasks/{i}/id")
        seen.add(tid)
        baseline = None
        if "baseline" in obj:
            base_dir = root / obj["baseline"]
            if not base_dir.is_dir():
                raise MissingFixture(base_dir)
            baseline = load_case(base_dir)
        provided: list[tuple[str, bytes]] = []
        for entry in obj.get("provided_files", ()):
            provided.extend(_read_bytes(root, entry["source"], entry["path"]))
        if "oracle" in obj:
            oracle_dir = root / obj["oracle"]
            if not oracle_dir.is_dir():
                raise MissingFixture(oracle_dir)
            oracles[tid] = oracle_dir
        expected = {k[len("expected_"):]: obj[k] for k in EXPECTED_KEYS if k in obj}
        if "published" in obj:
            expected["published"] = obj["published"]
        limits = IterationLimits(max_iterations=obj.get("max_iterations", 20))
        tasks.append(TaskSpec(
            id=tid,
            kind=obj["kind"],
            description=obj["description"],
            baseline_case=baseline,
            provided_files=tuple(provided),
            assertions=tuple(assertion_from_json(a) for a in obj.get("assertions", ())),
            solver_hint=obj.get("solver_hint"),
            limits=limits,
            label=obj.get("label", tid),
            expected=expected,
        ))
    return Suite(name=doc["name"], tasks=tuple(tasks), fixtures_root=root, oracles=oracles,
                 source_path=path)
