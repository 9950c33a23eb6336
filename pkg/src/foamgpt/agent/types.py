"""Values passed around the generate/run/repair loop."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..llm import UsageTotals

COMMAND_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_.-]*$")
# "[Fatal R1] 0/U: " prefix of a rendered Violation
_VIOLATION_PREFIX = re.compile(r"^\[(?:Fatal|Warning) [A-Z]\d+\] [^:]+: ")

SOURCES = ("exit_code", "fatal_pattern", "timeout", "validation")
OUTCOMES = ("success", "failed_max_iterations", "failed_unrecoverable", "failed_check")


@dataclass(frozen=True)
class CommandSpec:
    """A program run with cwd = case directory; never passed through a shell."""

    program: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not COMMAND_NAME.match(self.program):
            raise ValueError(f"invalid command name {self.program!r}")

    def __str__(self) -> str:
        return " ".join((self.program,) + self.args)

    def to_json(self) -> list:
        return [self.program, *self.args]


@dataclass(frozen=True)
class ExecutionPlan:
    files_to_generate: tuple[str, ...]
    commands: tuple[CommandSpec, ...]
    solver: str
    copies: tuple[str, ...] = ()
    # "llm" when the model's plan was used, "fallback" for the registry template
    source: str = "llm"
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.commands:
            raise ValueError("a plan needs at least one command")
        if self.commands[-1].program != self.solver:
            raise ValueError(f"final command must be the solver {self.solver}")

    def to_json(self) -> dict:
        return {
            "files": list(self.files_to_generate),
            "commands": [c.to_json() for c in self.commands],
            "solver": self.solver,
            "copies": list(self.copies),
            "source": self.source,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class ErrorReport:
    source: str
    excerpt: str
    command: str
    keyword: Optional[str] = None

    def __post_init__(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(f"unknown error source {self.source!r}")
        if not self.excerpt:
            raise ValueError("error excerpt must be nonempty")

    def head(self) -> str:
        """First informative line, used in report tables."""
        for line in self.excerpt.splitlines():
            text = line.strip().lstrip("-> ").strip()
            if text and not text.startswith("FOAM FATAL") and not text.startswith("Validation failed"):
                return _VIOLATION_PREFIX.sub("", text)
        return self.excerpt.splitlines()[0].strip()

    def to_json(self) -> dict:
        return {"source": self.source, "excerpt": self.excerpt, "command": self.command,
                "keyword": self.keyword}

    @classmethod
    def from_json(cls, obj: dict) -> "ErrorReport":
        return cls(obj["source"], obj["excerpt"], obj["command"], obj.get("keyword"))


@dataclass(frozen=True)
class RunOutcome:
    error: Optional[ErrorReport] = None
    commands_run: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class TrialRecord:
    task_id: str
    backend_model: str
    iterations_used: int
    outcome: str
    usage: UsageTotals
    cost: int
    final_error: Optional[ErrorReport] = None
    transcript_path: str = "transcript.jsonl"
    backend: str = ""
    case_label: str = ""
    files_provided: str = ""
    suite_index: int = 0
    check_passed: Optional[bool] = None
    plan_source: str = ""
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if self.outcome == "success" and self.final_error is not None:
            raise ValueError("a successful trial carries no final error")

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "backend": self.backend,
            "backend_model": self.backend_model,
            "case_label": self.case_label,
            "files_provided": self.files_provided,
            "suite_index": self.suite_index,
            "iterations_used": self.iterations_used,
            "outcome": self.outcome,
            "check_passed": self.check_passed,
            "usage": {"input_tokens": self.usage.input_tokens,
                      "output_tokens": self.usage.output_tokens},
            "cost_micro_usd": self.cost,
            "final_error": self.final_error.to_json() if self.final_error else None,
            "transcript_path": self.transcript_path,
            "plan_source": self.plan_source,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrialRecord":
        err = obj.get("final_error")
        return cls(
            task_id=obj["task_id"],
            backend_model=obj["backend_model"],
            iterations_used=int(obj["iterations_used"]),
            outcome=obj["outcome"],
            usage=UsageTotals(int(obj["usage"]["input_tokens"]), int(obj["usage"]["output_tokens"])),
            cost=int(obj["cost_micro_usd"]),
            final_error=ErrorReport.from_json(err) if err else None,
            transcript_path=obj.get("transcript_path", ""),
            backend=obj.get("backend", ""),
            case_label=obj.get("case_label", ""),
            files_provided=obj.get("files_provided", ""),
            suite_index=int(obj.get("suite_index", 0)),
            check_passed=obj.get("check_passed"),
            plan_source=obj.get("plan_source", ""),
            warnings=tuple(obj.get("warnings", ())),
        )
