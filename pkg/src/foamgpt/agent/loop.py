"""The generate, validate, run and repair loop for one trial."""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Protocol, Sequence, Union

from ..case import CaseTree, TaskSpec, fatal, required_artifacts, validate_case, write_case
from ..llm import BackendError, ChatRequest, ChatResponse, UsageTotals, compute_cost, send_chat
from .interpret import NoFilesFound, interpret_files
from .plan import NoPlanPossible, build_plan
from .prompts import load_prompt
from .retry import BudgetImpossible, compose_request
from .runners import RunnerUnavailable, execute_commands
from .types import ErrorReport, ExecutionPlan, TrialRecord

log = logging.getLogger(__name__)

UNRECOVERABLE = (BackendError, BudgetImpossible, RunnerUnavailable, NoPlanPossible)


class Retriever(Protocol):
    def retrieve(self, task: TaskSpec) -> Sequence[str]: ...


class NullRetriever:
    """Zero-shot default: no retrieved context."""

    def retrieve(self, task: TaskSpec) -> Sequence[str]:
        return ()


class Transcript:
    """Append-only JSONL log of every model exchange in a trial."""

    def __init__(self, path: Path) -> None:
        self.path = path
        self.usage = UsageTotals()
        self._seq = 0
        self._lock = threading.Lock()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("", encoding="utf-8")

    def record(self, kind: str, req: ChatRequest, resp: ChatResponse,
               iteration: Optional[int] = None) -> None:
        with self._lock:
            self._seq += 1
            self.usage = self.usage + resp.usage
            entry = {
                "seq": self._seq,
                "kind": kind,
                "iteration": iteration,
                "request": req.wire_payload(),
                "response": resp.content,
                "finish_reason": resp.finish_reason,
                "usage": {"input_tokens": resp.usage.input_tokens,
                          "output_tokens": resp.usage.output_tokens},
                "timestamp": datetime.now(timezone.utc).isoformat(),
            }
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")


def read_transcript(path: Union[str, Path]) -> list[dict]:
    lines = Path(path).read_text("utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]


def starting_case(task: TaskSpec) -> CaseTree:
    """Baseline case (modify tasks) with provided files placed on top."""
    case = task.baseline_case or CaseTree(root_name=task.id)
    for path, data in task.provided_files:
        case = case.with_bytes(path, data)
    return case


def _validation_report(violations, solver: str) -> ErrorReport:
    lines = [f"Validation failed before running {solver}:"]
    lines += [str(v) for v in violations]
    first = violations[0]
    return ErrorReport("validation", "\n".join(lines), "validate", first.keyword)


def run_agent(
    task: TaskSpec,
    backend,
    runner,
    workdir: Union[str, Path],
    *,
    system_prompt: Optional[str] = None,
    retriever: Optional[Retriever] = None,
) -> TrialRecord:
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    transcript = Transcript(workdir / "transcript.jsonl")
    system = system_prompt or load_prompt("system")
    context = tuple((retriever or NullRetriever()).retrieve(task))
    limits = task.limits
    provided = {p for p, _ in task.provided_files}
    warnings: list[str] = []
    plan: Optional[ExecutionPlan] = None
    err: Optional[ErrorReport] = None
    iterations = 0
    outcome = "failed_max_iterations"

    def finish(result: str) -> TrialRecord:
        record = TrialRecord(
            task_id=task.id,
            backend_model=backend.config.model,
            backend=backend.config.label,
            iterations_used=iterations,
            outcome=result,
            usage=transcript.usage,
            cost=compute_cost(transcript.usage, backend.pricing),
            final_error=None if result == "success" else err,
            transcript_path=str(transcript.path),
            case_label=task.label or task.id,
            files_provided=task.files_provided_label(),
            plan_source=plan.source if plan else "",
            warnings=tuple(warnings),
        )
        (workdir / "record.json").write_text(
            json.dumps(record.to_json(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        return record

    case = starting_case(task)
    reminder = False
    try:
        plan = build_plan(task, backend, lambda kind, q, r: transcript.record(kind, q, r))
        warnings.extend(plan.warnings)
        reqs = required_artifacts(plan.solver)
        for k in range(1, limits.max_iterations + 1):
            iterations = k
            req = compose_request(task, case, err, backend.pricing, limits, plan=plan,
                                  system_prompt=system, reminder=reminder, context=context,
                                  model=backend.config.model)
            resp = send_chat(backend, req)
            transcript.record("files", req, resp, iteration=k)
            iter_dir = workdir / f"iter_{k}"
            try:
                files = interpret_files(resp.content)
            except NoFilesFound as exc:
                reminder = True
                err = ErrorReport("validation", f"No FILE blocks found in the reply: {exc}",
                                  "interpret")
                write_case(case, iter_dir)
                (iter_dir / "log.interpret").write_text(err.excerpt + "\n", encoding="utf-8")
                continue
            reminder = False
            for path, text in files:
                if path in provided:
                    msg = f"iteration {k}: generated {path} overrides a provided file"
                    log.info(msg)
                    warnings.append(msg)
                case = case.with_text(path, text)
            violations = fatal(validate_case(case, reqs))
            write_case(case, iter_dir)
            if violations:
                err = _validation_report(violations, plan.solver)
                (iter_dir / "log.validate").write_text(err.excerpt + "\n", encoding="utf-8")
                continue
            result = execute_commands(iter_dir, plan, runner)
            if result.ok:
                err = None
                return finish("success")
            err = result.error
        return finish("failed_max_iterations")
    except UNRECOVERABLE as exc:
        warnings.append(f"unrecoverable: {type(exc).__name__}: {exc}")
        log.warning("task %s: %s", task.id, warnings[-1])
        return finish("failed_unrecoverable")


def relocate(record: TrialRecord, base: Path) -> TrialRecord:
    """Express the transcript path relative to ``base``."""
    try:
        rel = Path(record.transcript_path).resolve().relative_to(base.resolve())
    except ValueError:
        return record
    return replace(record, transcript_path=rel.as_posix())
