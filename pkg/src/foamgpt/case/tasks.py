"""Benchmark task descriptions and declarative checks of their requested edits."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Any, Mapping, Optional, Sequence, Union

from ..foamdict import (
    Atom,
    DimensionSet,
    Dict,
    FoamParseError,
    List,
    Number,
    Seq,
    Vector,
    format_value,
    lookup,
    parse_value,
)
from ..foamdict.access import NotADict, NotFound
from .tree import CaseTree

OPS = ("equals", "endswith", "contains", "one_of", "exists", "exists_any", "between", "file_exists")


class UncheckableTask(ValueError):
    """The task carries no assertions, so its outcome is indeterminate."""


@dataclass(frozen=True)
class Assertion:
    """``path:key`` must satisfy ``op`` against ``value``.

    ``key`` is a slash-separated keyword path inside the dictionary at
    ``path``. For ``exists_any`` the candidates are ``value`` (list of keys);
    for ``one_of`` ``value`` is the list of admissible words; for ``between``
    ``value`` is ``[lo, hi]`` inclusive.
    """

    path: str
    key: Optional[str]
    op: str
    value: Any = None

    def __post_init__(self) -> None:
        if self.op not in OPS:
            raise ValueError(f"unknown assertion op {self.op!r}")

    def describe(self) -> str:
        target = f"{self.path}:{self.key}" if self.key else self.path
        if self.op in ("exists", "file_exists"):
            return f"{target} exists"
        return f"{target} {self.op} {self.value!r}"

    def to_json(self) -> dict:
        out: dict = {"path": self.path, "op": self.op}
        if self.key is not None:
            out["key"] = self.key
        if self.value is not None:
            out["value"] = list(self.value) if isinstance(self.value, tuple) else self.value
        return out


@dataclass(frozen=True)
class AnyOf:
    """Passes when at least one alternative group passes in full."""

    groups: tuple[tuple[Assertion, ...], ...]

    def describe(self) -> str:
        return " OR ".join("(" + " and ".join(a.describe() for a in g) + ")" for g in self.groups)

    def to_json(self) -> dict:
        return {"any": [[a.to_json() for a in g] for g in self.groups]}


Check = Union[Assertion, AnyOf]


def assertion_from_json(obj: Mapping) -> Check:
    if "any" in obj:
        return AnyOf(tuple(tuple(_plain(a) for a in group) for group in obj["any"]))
    return _plain(obj)


def _plain(obj: Mapping) -> Assertion:
    value = obj.get("value")
    if isinstance(value, list):
        value = tuple(value)
    return Assertion(path=obj["path"], key=obj.get("key"), op=obj["op"], value=value)


@dataclass(frozen=True)
class IterationLimits:
    max_iterations: int = 20
    per_run_wall_seconds: int = 600
    token_budget_fraction: Decimal = Decimal("0.8")

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0 < self.token_budget_fraction <= 1:
            raise ValueError("token_budget_fraction must be in (0, 1]")


@dataclass(frozen=True)
class TaskSpec:
    id: str
    kind: str
    description: str
    baseline_case: Optional[CaseTree] = None
    provided_files: tuple[tuple[str, bytes], ...] = ()
    assertions: tuple[Check, ...] = ()
    solver_hint: Optional[str] = None
    limits: IterationLimits = field(default_factory=IterationLimits)
    # display label for reports, e.g. "Cavity" or "Bubble"
    label: str = ""
    # published observations keyed by backend column, e.g. {"qwen": "pass"}
    expected: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in ("generate", "modify"):
            raise ValueError(f"task kind must be generate or modify, got {self.kind!r}")
        if self.kind == "modify" and self.baseline_case is None:
            raise ValueError(f"modify task {self.id} has no baseline case")

    def files_provided_label(self) -> str:
        """Comma list of provided file names as the report shows them."""
        names: list[str] = []
        for path, _ in self.provided_files:
            parts = path.split("/")
            name = "polyMesh" if "polyMesh" in parts else parts[-1]
            if name not in names:
                names.append(name)
        return ", ".join(names) if names else "none"


@dataclass(frozen=True)
class FailedAssertion:
    check: Check
    reason: str

    def __str__(self) -> str:
        return f"{self.check.describe()}: {self.reason}"


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    failed_assertions: tuple[FailedAssertion, ...] = ()


# ---------------------------------------------------------------- comparison

def values_equal(a, b) -> bool:
    """Structural equality with numbers compared by value (``2`` == ``2.0``)."""
    if isinstance(a, Number) and isinstance(b, Number):
        return a.value == b.value
    if isinstance(a, Vector) and isinstance(b, Vector):
        return len(a.components) == len(b.components) and all(
            values_equal(x, y) for x, y in zip(a.components, b.components))
    if isinstance(a, DimensionSet) and isinstance(b, DimensionSet):
        return all(values_equal(x, y) for x, y in zip(a.exponents, b.exponents))
    if isinstance(a, (Seq, List)) and type(a) is type(b):
        return len(a.items) == len(b.items) and all(
            values_equal(x, y) for x, y in zip(a.items, b.items))
    if isinstance(a, Dict) and isinstance(b, Dict):
        ka, kb = list(a.keys()), list(b.keys())
        return sorted(ka) == sorted(kb) and all(values_equal(a[k], b[k]) for k in ka)
    if isinstance(a, Atom) and isinstance(b, Atom):
        return a.text.strip('"') == b.text.strip('"')
    return a == b


def _expected(value: Any):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Number(str(value))
    try:
        return parse_value(str(value))
    except FoamParseError:
        return Atom(str(value))


def _last_scalar(value) -> Optional[str]:
    tokens = format_value(value).replace("(", " ").replace(")", " ").split()
    return tokens[-1] if tokens else None


def _decimal(text: Any) -> Optional[Decimal]:
    try:
        return Decimal(str(text))
    except (InvalidOperation, ValueError):
        return None


def _words(value) -> list[str]:
    if isinstance(value, Atom):
        return [value.text.strip('"')]
    if isinstance(value, Number):
        return [value.lexeme]
    if isinstance(value, (Seq, List)):
        return [w for item in value.items for w in _words(item)]
    if isinstance(value, Vector):
        return [c.lexeme for c in value.components]
    return []


def _resolve(case: CaseTree, path: str, key: str):
    foam = case.foam(path)
    if foam is None:
        if path in case:
            raise LookupError(f"{path} is not a parsed dictionary")
        raise LookupError(f"file {path} not found")
    try:
        return lookup(foam.body, key)
    except (NotFound, NotADict):
        raise LookupError(f"keyword {key} not found in {path}") from None


def _evaluate(case: CaseTree, a: Assertion) -> Optional[str]:
    """None when the assertion holds, else the reason it does not."""
    if a.op == "file_exists":
        return None if a.path in case else f"file {a.path} not found"
    if a.op == "exists_any":
        for key in a.value or ():
            try:
                _resolve(case, a.path, key)
                return None
            except LookupError:
                continue
        return f"none of {list(a.value or ())} found in {a.path}"
    try:
        actual = _resolve(case, a.path, a.key or "")
    except LookupError as exc:
        return str(exc)
    shown = format_value(actual) if not isinstance(actual, Dict) else "{...}"
    if a.op == "exists":
        return None
    if a.op == "equals":
        if values_equal(actual, _expected(a.value)):
            return None
        return f"got {shown}"
    if a.op == "endswith":
        last = _last_scalar(actual)
        want = str(a.value)
        lhs, rhs = _decimal(last), _decimal(want)
        ok = (lhs == rhs) if lhs is not None and rhs is not None else last == want
        return None if ok else f"got {shown}"
    if a.op == "contains":
        return None if str(a.value) in _words(actual) else f"got {shown}"
    if a.op == "one_of":
        words = _words(actual)
        return None if words and words[0] in a.value else f"got {shown}"
    if a.op == "between":
        lo, hi = (_decimal(x) for x in a.value)
        num = _decimal(_last_scalar(actual))
        if num is not None and lo <= num <= hi:
            return None
        return f"got {shown}"
    raise AssertionError(a.op)


def _evaluate_check(case: CaseTree, check: Check) -> Optional[str]:
    if isinstance(check, AnyOf):
        reasons = []
        for group in check.groups:
            failed = [r for r in (_evaluate(case, a) for a in group) if r]
            if not failed:
                return None
            reasons.append(failed[0])
        return "; ".join(reasons)
    return _evaluate(case, check)


def check_task(case: CaseTree, task: Union[TaskSpec, Sequence[Check]]) -> CheckResult:
    checks = task.assertions if isinstance(task, TaskSpec) else tuple(task)
    if not checks:
        raise UncheckableTask(getattr(task, "id", "task") + " has no assertions")
    failed = []
    for check in checks:
        reason = _evaluate_check(case, check)
        if reason is not None:
            failed.append(FailedAssertion(check, reason))
    return CheckResult(passed=not failed, failed_assertions=tuple(failed))


__all__ = [
    "AnyOf",
    "Assertion",
    "Check",
    "CheckResult",
    "FailedAssertion",
    "IterationLimits",
    "TaskSpec",
    "UncheckableTask",
    "assertion_from_json",
    "check_task",
    "values_equal",
]
