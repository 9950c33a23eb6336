"""Scripted oracle responses built from a suite's known-good fixture files."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from ..agent.plan import task_solver
from ..case import TaskSpec, required_artifacts
from .suite import Suite


def _oracle_files(suite: Suite, task: TaskSpec) -> list[tuple[str, str]]:
    root = suite.oracles.get(task.id)
    if root is None:
        raise KeyError(f"task {task.id} has no oracle fixture")
    return [(p.relative_to(root).as_posix(), p.read_text("utf-8"))
            for p in sorted(root.rglob("*")) if p.is_file()]


def files_response(files: list[tuple[str, str]]) -> str:
    blocks = [f"FILE: {path}\n```\n{text.rstrip(chr(10))}\n```" for path, text in files]
    return "Here are the case files.\n\n" + "\n\n".join(blocks) + "\n"


def plan_response(task: TaskSpec, solver: str, files: list[str]) -> str:
    known = set(files) | {p for p, _ in task.provided_files}
    if task.baseline_case is not None:
        known |= set(task.baseline_case.entries)
    commands = []
    if not any(p.startswith("constant/polyMesh/") for p in known):
        commands.append("blockMesh")
    if "system/setFieldsDict" in known or "system/setFieldsDict" in required_artifacts(solver).required_files:
        commands.append("setFields")
    commands.append(solver)
    return json.dumps({"solver": solver, "commands": commands, "files": files})


def oracle_script(suite: Suite, task: TaskSpec, skip_edit: bool = False) -> list[str]:
    """[plan, files] responses that solve ``task`` on the first attempt.

    With ``skip_edit`` a modify task gets its baseline files back unchanged,
    so the case runs but the requested edit is missing.
    """
    files = _oracle_files(suite, task)
    solver = task_solver(task)
    if skip_edit and task.baseline_case is not None:
        base = task.baseline_case
        files = [(p, base.text_of(p)) for p, _ in files if p in base]
        if not files:
            files = [("system/controlDict", base.text_of("system/controlDict"))]
        solver = task_solver(TaskSpec(id=task.id, kind="modify", description="",
                                      baseline_case=base)) or solver
    return [plan_response(task, solver, [p for p, _ in files]), files_response(files)]


def write_oracle_scripts(suite: Suite, directory: Union[str, Path],
                         skip: frozenset = frozenset()) -> list[Path]:
    """One ``<task_id>.json`` script per task; ids in ``skip`` omit their edit."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for task in suite.tasks:
        script = oracle_script(suite, task, skip_edit=task.id in skip)
        path = out / f"{task.id}.json"
        path.write_text(json.dumps(script, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        written.append(path)
    return written
