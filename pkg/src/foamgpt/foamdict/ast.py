"""AST node types for OpenFOAM dictionary files.

All nodes are frozen dataclasses, so equality is structural and values can be
shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterator, Optional, Tuple, Union


@dataclass(frozen=True)
class Atom:
    """A bare word or quoted string token (``kOmegaSST``, ``uniform``, ``"(U|k)"``)."""

    text: str

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class Number:
    """A numeric token. The original lexeme is kept so re-emission is lossless."""

    lexeme: str

    @property
    def value(self) -> Decimal:
        return Decimal(self.lexeme)

    @classmethod
    def of(cls, value: Union[int, float, Decimal, str]) -> "Number":
        if isinstance(value, bool):
            raise TypeError("booleans are not numbers in a FoamFile")
        if isinstance(value, float):
            return cls(repr(value))
        return cls(str(value))

    def __str__(self) -> str:
        return self.lexeme


@dataclass(frozen=True)
class DimensionSet:
    """``[0 1 -1 0 0 0 0]``: exponents of mass, length, time, temperature,
    quantity, current, luminous intensity."""

    exponents: Tuple[Number, ...]

    def __post_init__(self) -> None:
        if len(self.exponents) != 7:
            raise ValueError(f"DimensionSet needs 7 components, got {len(self.exponents)}")


@dataclass(frozen=True)
class Vector:
    """Parenthesised run of numbers such as ``(2 0 0)``."""

    components: Tuple[Number, ...]

    @classmethod
    def of(cls, *values: Union[int, float, Decimal, str]) -> "Vector":
        return cls(tuple(Number.of(v) for v in values))


@dataclass(frozen=True)
class List:
    """Parenthesised list of arbitrary values.

    ``size_prefixed`` records the ``N(...)`` form so it survives a round trip.
    """

    items: Tuple["FoamValue", ...] = ()
    size_prefixed: bool = False


@dataclass(frozen=True)
class Seq:
    """Several whitespace-separated values forming one entry value,
    e.g. ``uniform (0 0 0)`` or ``nu [0 2 -1 0 0 0 0] 1e-05``."""

    items: Tuple["FoamValue", ...] = ()


@dataclass(frozen=True)
class Raw:
    """Verbatim text the grammar subset does not interpret: directives,
    ``$macro`` references, ``#{ code #}`` blocks and unparseable tails."""

    text: str


# An entry key of None marks an anonymous entry (directive, macro
# reference, raw tail, or standalone data such as a boundary list).
Entry = Tuple[Optional[str], "FoamValue"]


@dataclass(frozen=True)
class Dict:
    """Ordered keyword -> value mapping.

    Entries are stored as a tuple of pairs. Duplicate keywords are kept for
    fidelity; lookup follows OpenFOAM and returns the last occurrence.
    """

    entries: Tuple[Entry, ...] = field(default=())

    @classmethod
    def of(cls, **kwargs: "FoamValue") -> "Dict":
        return cls(tuple(kwargs.items()))

    def _index(self, key: str) -> int:
        for i in range(len(self.entries) - 1, -1, -1):
            if self.entries[i][0] == key:
                return i
        return -1

    def __contains__(self, key: object) -> bool:
        return isinstance(key, str) and self._index(key) >= 0

    def __getitem__(self, key: str) -> "FoamValue":
        i = self._index(key)
        if i < 0:
            raise KeyError(key)
        return self.entries[i][1]

    def get(self, key: str, default: Optional["FoamValue"] = None) -> Optional["FoamValue"]:
        i = self._index(key)
        return self.entries[i][1] if i >= 0 else default

    def keys(self) -> Iterator[str]:
        seen = set()
        for k, _ in self.entries:
            if k is not None and k not in seen:
                seen.add(k)
                yield k

    def items(self) -> Iterator[Tuple[str, "FoamValue"]]:
        for k in self.keys():
            yield k, self[k]

    def anonymous(self) -> Iterator["FoamValue"]:
        for k, v in self.entries:
            if k is None:
                yield v

    def set(self, key: str, value: "FoamValue") -> "Dict":
        """Return a copy with ``key`` replaced in place, or appended if absent."""
        i = self._index(key)
        if i < 0:
            return Dict(self.entries + ((key, value),))
        return Dict(self.entries[:i] + ((key, value),) + self.entries[i + 1 :])

    def remove(self, key: str) -> "Dict":
        return Dict(tuple(e for e in self.entries if e[0] != key))

    def __len__(self) -> int:
        return len(self.entries)


FoamValue = Union[Atom, Number, DimensionSet, Vector, List, Seq, Dict, Raw]


@dataclass(frozen=True)
class FoamFile:
    header: Dict
    body: Dict
    source_path: Optional[str] = None

    @property
    def object_name(self) -> Optional[str]:
        obj = self.header.get("object")
        return obj.text.strip('"') if isinstance(obj, Atom) else None

    @property
    def class_name(self) -> Optional[str]:
        cls = self.header.get("class")
        return cls.text.strip('"') if isinstance(cls, Atom) else None


def make_header(class_name: str, object_name: str, location: Optional[str] = None) -> Dict:
    entries: list = [
        ("version", Number("2.0")),
        ("format", Atom("ascii")),
        ("class", Atom(class_name)),
    ]
    if location is not None:
        entries.append(("location", Atom(f'"{location}"')))
    entries.append(("object", Atom(object_name)))
    return Dict(tuple(entries))
