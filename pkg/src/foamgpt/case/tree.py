"""In-memory model of an OpenFOAM case directory."""

from __future__ import annotations

import logging
import posixpath
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Mapping, Optional, Union

from ..foamdict import FoamFile, FoamParseError, parse_foam_file, serialize_foam_file

log = logging.getLogger(__name__)

DICT_ROOTS = ("0", "system", "constant")


@dataclass(frozen=True)
class ParsedFile:
    foam: FoamFile


@dataclass(frozen=True)
class Blob:
    data: bytes


CaseEntry = Union[ParsedFile, Blob]


def normalize_path(path: str) -> str:
    """Case-relative POSIX path; rejects absolute paths and ``..`` segments."""
    p = str(path).replace("\\", "/").strip()
    if not p or p.startswith("/") or (len(p) > 1 and p[1] == ":"):
        raise ValueError(f"not a case-relative path: {path!r}")
    if ".." in p.split("/"):
        raise ValueError(f"path escapes the case directory: {path!r}")
    norm = posixpath.normpath(p)
    if norm in (".", ""):
        raise ValueError(f"not a case-relative path: {path!r}")
    return norm


def is_dictionary_path(rel: str) -> bool:
    parts = rel.split("/")
    if parts[0] not in DICT_ROOTS or len(parts) < 2:
        return False
    if parts[:2] == ["constant", "polyMesh"]:
        return rel == "constant/polyMesh/boundary"
    return True


@dataclass(frozen=True)
class CaseTree:
    """Ordered map of case-relative path -> ParsedFile | Blob.

    Treated as an immutable value: the ``with_*`` helpers return new trees.
    ``warnings`` maps paths that fell back to Blob to the parse error.
    """

    entries: Mapping[str, CaseEntry] = field(default_factory=dict)
    root_name: str = "case"
    warnings: Mapping[str, str] = field(default_factory=dict)

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, path: object) -> bool:
        return path in self.entries

    def get(self, path: str) -> Optional[CaseEntry]:
        return self.entries.get(path)

    def foam(self, path: str) -> Optional[FoamFile]:
        entry = self.entries.get(path)
        return entry.foam if isinstance(entry, ParsedFile) else None

    def with_entry(self, path: str, entry: CaseEntry) -> "CaseTree":
        path = normalize_path(path)
        entries = dict(self.entries)
        entries[path] = entry
        warnings = {k: v for k, v in self.warnings.items() if k != path}
        return replace(self, entries=entries, warnings=warnings)

    def with_text(self, path: str, text: str) -> "CaseTree":
        """Add a file from text, parsing it when it lives where dictionaries do."""
        return self.with_bytes(path, text.encode("utf-8"))

    def with_bytes(self, path: str, data: bytes) -> "CaseTree":
        """Like with_text; undecodable or non-dictionary data stays a Blob."""
        path = normalize_path(path)
        entry, warning = _classify(path, data)
        tree = self.with_entry(path, entry)
        if warning:
            tree = replace(tree, warnings={**tree.warnings, path: warning})
        return tree

    def without(self, path: str) -> "CaseTree":
        entries = {k: v for k, v in self.entries.items() if k != path}
        return replace(self, entries=entries)

    def merged(self, other: "CaseTree") -> "CaseTree":
        """Entries of ``other`` override entries of ``self``."""
        entries = dict(self.entries)
        entries.update(other.entries)
        warnings = {k: v for k, v in self.warnings.items() if k not in other.entries}
        warnings.update(other.warnings)
        return replace(self, entries=entries, warnings=warnings)

    def text_of(self, path: str) -> Optional[str]:
        entry = self.entries.get(path)
        if isinstance(entry, ParsedFile):
            return serialize_foam_file(entry.foam)
        if isinstance(entry, Blob):
            try:
                return entry.data.decode("utf-8")
            except UnicodeDecodeError:
                return None
        return None


def _classify(rel: str, data: bytes) -> tuple[CaseEntry, Optional[str]]:
    if not is_dictionary_path(rel):
        return Blob(data), None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return Blob(data), None
    if "FoamFile" not in text:
        return Blob(data), None
    try:
        return ParsedFile(parse_foam_file(text, source_path=rel)), None
    except FoamParseError as exc:
        return Blob(data), f"unparseable dictionary: {exc}"


def load_case(directory: Union[str, Path]) -> CaseTree:
    """Read every file below ``directory``.

    Corrupt dictionaries degrade to Blob with a warning; they never abort.
    """
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"case directory not found: {root}")
    entries: dict[str, CaseEntry] = {}
    warnings: dict[str, str] = {}
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root).as_posix()
        entry, warning = _classify(rel, path.read_bytes())
        entries[rel] = entry
        if warning:
            log.warning("%s: %s", rel, warning)
            warnings[rel] = warning
    return CaseTree(entries=entries, root_name=root.name, warnings=warnings)


def write_case(case: CaseTree, directory: Union[str, Path]) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for rel, entry in case.entries.items():
        target = root / normalize_path(rel)
        target.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(entry, ParsedFile):
            target.write_text(serialize_foam_file(entry.foam), encoding="utf-8")
        else:
            target.write_bytes(entry.data)


def cases_equal(a: CaseTree, b: CaseTree) -> bool:
    """Structural equality of contents, ignoring the root name."""
    return dict(a.entries) == dict(b.entries)
