"""Run every (task, backend) trial of a suite and collect records."""

from __future__ import annotations

import logging
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from ..agent import MockRunner, RealRunner, run_agent
from ..agent.loop import relocate
from ..agent.types import ErrorReport, TrialRecord
from ..case import TaskSpec, check_task, load_case
from ..llm import BackendConfig, Pricing, UsageTotals, default_pricing, make_backend
from ..llm.errors import BackendError
from .records import ResultsLog
from .suite import Suite

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchConfig:
    backends: tuple[BackendConfig, ...]
    output_dir: Path
    runner: str = "mock"
    parallelism: int = 1
    repeat: int = 1
    pricing_table: tuple[Pricing, ...] = field(default_factory=lambda: tuple(default_pricing()))
    system_prompt: Optional[str] = None

    def __post_init__(self) -> None:
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.repeat < 1:
            raise ValueError("repeat must be >= 1")
        if self.runner not in ("mock", "real"):
            raise ValueError(f"runner must be mock or real, got {self.runner!r}")
        if not self.backends:
            raise ValueError("at least one backend is required")
        labels = [b.label for b in self.backends]
        if len(set(labels)) != len(labels):
            raise ValueError(f"backend labels must be unique: {labels}")


def _script_for(cfg: BackendConfig, task: TaskSpec) -> Optional[Path]:
    if cfg.kind != "scripted":
        return None
    path = Path(cfg.script_path)
    if path.is_dir():
        return path / f"{task.id}.json"
    return path


def _trial(suite: Suite, index: int, task: TaskSpec, cfg: BackendConfig, shared,
           bench: BenchConfig, workdir: Path) -> TrialRecord:
    if workdir.exists():
        shutil.rmtree(workdir)
    workdir.mkdir(parents=True)
    runner = MockRunner() if bench.runner == "mock" else RealRunner(task.limits.per_run_wall_seconds)
    try:
        backend = shared if shared is not None else make_backend(
            cfg, bench.pricing_table, script_path=_script_for(cfg, task))
    except (BackendError, OSError, ValueError) as exc:
        record = TrialRecord(
            task_id=task.id, backend_model=cfg.model, backend=cfg.label, iterations_used=0,
            outcome="failed_unrecoverable", usage=UsageTotals(), cost=0,
            case_label=task.label, files_provided=task.files_provided_label(),
            warnings=(f"unrecoverable: {type(exc).__name__}: {exc}",))
    else:
        record = run_agent(task, backend, runner, workdir, system_prompt=bench.system_prompt)
    record = replace(record, suite_index=index)
    if record.outcome == "success" and task.assertions:
        final = load_case(workdir / f"iter_{record.iterations_used}")
        result = check_task(final, task)
        if result.passed:
            record = replace(record, check_passed=True)
        else:
            excerpt = "task check failed: " + "; ".join(str(f) for f in result.failed_assertions)
            record = replace(record, outcome="failed_check", check_passed=False,
                             final_error=ErrorReport("validation", excerpt, "check_task"))
    return relocate(record, bench.output_dir)


def run_suite(suite: Suite, cfg: BenchConfig) -> list[TrialRecord]:
    """Trials run concurrently up to ``cfg.parallelism``; each record is appended
    to ``<output_dir>/<suite>/results.jsonl`` as soon as its trial ends.
    Returns records in suite order, then backend order."""
    out = Path(cfg.output_dir)
    results = ResultsLog(out / suite.name / "results.jsonl")
    shared = {}
    for b in cfg.backends:
        if b.kind == "http":
            shared[b.label] = make_backend(b, cfg.pricing_table)
    jobs = []
    for index, task in enumerate(suite.tasks):
        for b in cfg.backends:
            for r in range(1, cfg.repeat + 1):
                name = task.id if cfg.repeat == 1 else f"{task.id}-r{r}"
                jobs.append((index, task, b, out / suite.name / b.label / name))

    def job(args) -> TrialRecord:
        index, task, b, workdir = args
        try:
            record = _trial(suite, index, task, b, shared.get(b.label), cfg, workdir)
        except Exception as exc:  # a crashed trial is a record, not a harness failure
            log.exception("trial %s/%s crashed", b.label, task.id)
            record = TrialRecord(
                task_id=task.id, backend_model=b.model, backend=b.label, iterations_used=0,
                outcome="failed_unrecoverable", usage=UsageTotals(), cost=0, suite_index=index,
                case_label=task.label, files_provided=task.files_provided_label(),
                warnings=(f"unrecoverable: {type(exc).__name__}: {exc}",))
        results.append(record)
        return record

    if cfg.parallelism == 1:
        records = [job(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            records = list(pool.map(job, jobs))
    return records


def bench_order(records: Sequence[TrialRecord]) -> list[TrialRecord]:
    return sorted(records, key=lambda r: (r.suite_index, r.backend, r.task_id))
