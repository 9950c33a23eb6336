"""Command execution against a written case directory, and log scanning."""

from __future__ import annotations

import logging
import os
import re
import shutil
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence, Union

from ..case import fatal, load_case, required_artifacts, validate_case
from .types import CommandSpec, ErrorReport, ExecutionPlan, RunOutcome

log = logging.getLogger(__name__)

MAX_EXCERPT_LINES = 40

_FATAL = re.compile(r"FOAM FATAL (IO )?ERROR")
_END = re.compile(r"FOAM (exiting|aborting)")
_KEYWORD = re.compile(r"\bkeyword\s+['\"]?([A-Za-z_][\w.:]*)")
_NOT_FOUND = re.compile(r"['\"]([^'\"\s]+)['\"]\s+not found")


class RunnerUnavailable(RuntimeError):
    unrecoverable = True


def extract_error(log_text: str, exit_code: int,
                  command: str = "", max_lines: int = MAX_EXCERPT_LINES) -> Optional[ErrorReport]:
    lines = log_text.splitlines()
    for i, line in enumerate(lines):
        if _FATAL.search(line):
            excerpt = []
            for follow in lines[i:i + max_lines]:
                excerpt.append(follow)
                if _END.search(follow):
                    break
            text = "\n".join(excerpt).strip("\n")
            m = _KEYWORD.search(text) or _NOT_FOUND.search(text)
            return ErrorReport("fatal_pattern", text, command, m.group(1) if m else None)
    if exit_code == 0:
        return None
    tail = "\n".join(lines[-max_lines:]).strip("\n")
    if not tail:
        tail = f"{command or 'command'} exited with code {exit_code}"
    return ErrorReport("exit_code", tail, command)


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    log: str
    timed_out: bool = False


class Runner(Protocol):
    def run(self, command: CommandSpec, case_dir: Path, plan: ExecutionPlan) -> CommandResult: ...


def _banner(program: str) -> str:
    return (
        "/*---------------------------------------------------------------------------*\\\n"
        "  =========                 |\n"
        "  \\\\      /  F ield         | OpenFOAM: The Open Source CFD Toolbox\n"
        "   \\\\    /   O peration     | Version:  v2406\n"
        "    \\\\  /    A nd           |\n"
        "     \\\\/     M anipulation  |\n"
        "\\*---------------------------------------------------------------------------*/\n"
        f"Build  : _mock\nExec   : {program}\n\n"
    )


def fatal_log(program: str, message: str, file: str = "", io: bool = True) -> str:
    kind = "FOAM FATAL IO ERROR" if io else "FOAM FATAL ERROR"
    parts = [_banner(program), f"--> {kind}: (openfoam-2406)", message, ""]
    if file:
        parts += [f"file: {file}", ""]
    parts += [f"    From {program}", "", "FOAM exiting", ""]
    return "\n".join(parts)


class MockRunner:
    """Stands in for OpenFOAM executables without spawning processes.

    The solver command fails with an OpenFOAM-style log for the first Fatal
    violation that ``validate_case`` finds on the written case. An optional
    ``schedule`` is consumed one entry per solver invocation: ``"fail"``
    injects a failure, a dict ``{"fail": "<log text>"}`` injects that log,
    and ``"pass"`` defers to validation. After the schedule runs out every
    invocation defers to validation.
    """

    def __init__(self, schedule: Sequence[Union[str, dict]] = ()) -> None:
        for entry in schedule:
            if entry not in ("fail", "pass") and not (isinstance(entry, dict) and "fail" in entry):
                raise ValueError(f"bad schedule entry {entry!r}")
        self.schedule = list(schedule)
        self._lock = threading.Lock()
        self.invocations = 0

    def _next_entry(self):
        with self._lock:
            self.invocations += 1
            return self.schedule.pop(0) if self.schedule else "pass"

    def run(self, command: CommandSpec, case_dir: Path, plan: ExecutionPlan) -> CommandResult:
        case_dir = Path(case_dir)
        program = command.program
        if program == "blockMesh":
            if not (case_dir / "system/blockMeshDict").is_file():
                return CommandResult(1, fatal_log(program, "cannot find file \"system/blockMeshDict\"",
                                                  str(case_dir / "system/blockMeshDict")))
            return CommandResult(0, _banner(program) + "Writing polyMesh\nEnd\n")
        if program == "setFields":
            if not (case_dir / "system/setFieldsDict").is_file():
                return CommandResult(1, fatal_log(program, "cannot find file \"system/setFieldsDict\"",
                                                  str(case_dir / "system/setFieldsDict")))
            return CommandResult(0, _banner(program) + "Setting field region values\nEnd\n")
        if program != plan.solver:
            return CommandResult(0, _banner(program) + "End\n")

        entry = self._next_entry()
        if entry == "fail":
            return CommandResult(1, fatal_log(program, "scheduled failure injected by MockRunner",
                                              io=False))
        if isinstance(entry, dict):
            return CommandResult(1, entry["fail"])
        problems = fatal(validate_case(load_case(case_dir), required_artifacts(program)))
        if problems:
            v = problems[0]
            return CommandResult(1, fatal_log(program, v.message, str(case_dir / v.path)))
        return CommandResult(0, _banner(program) + "Starting time loop\n\nEnd\n")


class RealRunner:
    """Spawns OpenFOAM executables found on PATH (an OpenFOAM-v2406 environment)."""

    def __init__(self, wall_seconds: int = 600) -> None:
        self.wall_seconds = wall_seconds
        if not os.environ.get("WM_PROJECT_VERSION"):
            log.warning("WM_PROJECT_VERSION unset; the OpenFOAM environment may not be sourced")

    def run(self, command: CommandSpec, case_dir: Path, plan: ExecutionPlan) -> CommandResult:
        exe = shutil.which(command.program)
        if exe is None:
            raise RunnerUnavailable(f"{command.program} not found on PATH")
        try:
            proc = subprocess.run(
                [exe, *command.args], cwd=case_dir, stdout=subprocess.PIPE,
                stderr=subprocess.STDOUT, timeout=self.wall_seconds)
        except subprocess.TimeoutExpired as exc:
            out = exc.stdout or b""
            return CommandResult(-1, out.decode("utf-8", "replace"), timed_out=True)
        return CommandResult(proc.returncode, proc.stdout.decode("utf-8", "replace"))


def execute_commands(case_dir: Union[str, Path], plan: ExecutionPlan, runner) -> RunOutcome:
    """Run the plan's commands in order, logging each to ``log.<program>``."""
    case_dir = Path(case_dir)
    ran: list[str] = []
    for command in plan.commands:
        result = runner.run(command, case_dir, plan)
        (case_dir / f"log.{command.program}").write_text(result.log, encoding="utf-8")
        ran.append(str(command))
        if result.timed_out:
            tail = "\n".join(result.log.splitlines()[-MAX_EXCERPT_LINES:])
            excerpt = f"{command} exceeded its wall-clock limit\n{tail}".strip()
            return RunOutcome(ErrorReport("timeout", excerpt, str(command)), tuple(ran))
        report = extract_error(result.log, result.exit_code, str(command))
        if report is not None:
            return RunOutcome(report, tuple(ran))
    return RunOutcome(None, tuple(ran))
