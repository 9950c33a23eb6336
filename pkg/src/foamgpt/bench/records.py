"""Append-only JSONL persistence of trial records."""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Iterable, Union

from ..agent.types import TrialRecord
from .suite import SchemaError


def record_line(record: TrialRecord) -> str:
    return json.dumps(record.to_json(), ensure_ascii=False, sort_keys=True) + "\n"


def persist_records(records: Iterable[TrialRecord], path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_line(record))
            fh.flush()


def load_records(path: Union[str, Path]) -> list[TrialRecord]:
    out = []
    text = Path(path).read_text("utf-8")
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(TrialRecord.from_json(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad record: {exc}", f"{path}:{n}") from None
    return out


class ResultsLog:
    """Single writer shared by concurrent trials; each append is flushed."""

    def __init__(self, path: Union[str, Path], truncate: bool = True) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if truncate:
            self.path.write_text("", encoding="utf-8")
        self._lock = threading.Lock()

    def append(self, record: TrialRecord) -> None:
        with self._lock:
            persist_records([record], self.path)
