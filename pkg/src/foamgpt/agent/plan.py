"""Builder: ask the model for an execution plan, falling back to a registry template."""

from __future__ import annotations

import json
import logging
import re
from typing import Callable, Optional

from ..case import KNOWN_SOLVERS, TaskSpec, required_artifacts
from ..foamdict import Atom
from ..llm import ChatRequest, ChatResponse, Message, send_chat
from .prompts import load_prompt
from .types import CommandSpec, ExecutionPlan

log = logging.getLogger(__name__)

Recorder = Callable[[str, ChatRequest, ChatResponse], None]

_JSON_FENCE = re.compile(r"```(?:json)?\s*\n(.*?)```", re.DOTALL)

# Programs a model-written plan may run. Anything else (rm, sh, python, ...)
# makes the plan malformed, so the registry fallback is used instead.
UTILITIES = frozenset({
    "blockMesh", "snappyHexMesh", "surfaceFeatureExtract", "surfaceFeatures", "extrudeMesh",
    "checkMesh", "setFields", "topoSet", "createPatch", "createBaffles", "changeDictionary",
    "decomposePar", "reconstructPar", "renumberMesh", "mapFields", "refineMesh", "mirrorMesh",
    "transformPoints", "mergeMeshes", "fluentMeshToFoam", "gmshToFoam", "foamToVTK",
    "setExprFields", "makeFaMesh",
})
_SOLVER_NAME = re.compile(r"^[A-Za-z0-9]+Foam$")


def allowed_program(name: str) -> bool:
    return name in UTILITIES or name in KNOWN_SOLVERS or bool(_SOLVER_NAME.match(name))


class NoPlanPossible(ValueError):
    """Neither the model's plan nor a solver hint produced a plan."""


class MalformedPlan(ValueError):
    pass


def task_solver(task: TaskSpec) -> Optional[str]:
    """The solver hint, else the baseline controlDict's application."""
    if task.solver_hint:
        return task.solver_hint
    if task.baseline_case is not None:
        cd = task.baseline_case.foam("system/controlDict")
        app = cd.body.get("application") if cd is not None else None
        if isinstance(app, Atom):
            return app.text
    return None


def _known_paths(task: TaskSpec) -> set[str]:
    paths = {p for p, _ in task.provided_files}
    if task.baseline_case is not None:
        paths.update(task.baseline_case.entries)
    return paths


def plan_request(task: TaskSpec, model: str, prompt: Optional[str] = None) -> ChatRequest:
    known = sorted(_known_paths(task))
    lines = [f"Task: {task.description}"]
    if task.solver_hint:
        lines.append(f"Suggested solver: {task.solver_hint}")
    lines.append("Existing files: " + (", ".join(known) if known else "none"))
    return ChatRequest(model=model, messages=(
        Message("system", prompt or load_prompt("plan")),
        Message("user", "\n".join(lines)),
    ))


def _extract_json(text: str) -> dict:
    m = _JSON_FENCE.search(text)
    candidate = m.group(1) if m else text[text.find("{"): text.rfind("}") + 1]
    try:
        data = json.loads(candidate)
    except json.JSONDecodeError as exc:
        raise MalformedPlan(f"plan is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise MalformedPlan("plan must be a JSON object")
    return data


def _command(item) -> CommandSpec:
    if isinstance(item, str):
        parts = item.split()
    elif isinstance(item, list) and all(isinstance(x, str) for x in item):
        parts = item
    else:
        raise MalformedPlan(f"bad command entry {item!r}")
    if not parts:
        raise MalformedPlan("empty command")
    if not allowed_program(parts[0]):
        raise MalformedPlan(f"{parts[0]!r} is not an OpenFOAM solver or utility")
    try:
        return CommandSpec(parts[0], tuple(parts[1:]))
    except ValueError as exc:
        raise MalformedPlan(str(exc)) from None


def parse_plan(text: str, task: TaskSpec) -> ExecutionPlan:
    data = _extract_json(text)
    raw_commands = data.get("commands")
    if not isinstance(raw_commands, list) or not raw_commands:
        raise MalformedPlan("plan has no commands")
    commands = [_command(c) for c in raw_commands]
    solver = data.get("solver") or commands[-1].program
    if not isinstance(solver, str):
        raise MalformedPlan("solver must be a string")
    warnings = []
    if commands[-1].program != solver:
        warnings.append(f"plan did not end with solver {solver}; appended it")
        commands.append(_command(solver))
    files = data.get("files", [])
    if not isinstance(files, list) or not all(isinstance(f, str) for f in files):
        raise MalformedPlan("files must be a list of paths")
    return ExecutionPlan(
        files_to_generate=tuple(files),
        commands=tuple(commands),
        solver=solver,
        copies=tuple(p for p, _ in task.provided_files),
        source="llm",
        warnings=tuple(warnings),
    )


def fallback_plan(task: TaskSpec, reason: str = "") -> ExecutionPlan:
    solver = task_solver(task)
    if not solver:
        raise NoPlanPossible(f"task {task.id}: no usable plan and no solver hint"
                             + (f" ({reason})" if reason else ""))
    known = _known_paths(task)
    commands = []
    if "constant/polyMesh/boundary" not in known:
        commands.append(CommandSpec("blockMesh"))
    reqs = required_artifacts(solver)
    if "system/setFieldsDict" in known or "system/setFieldsDict" in reqs.required_files:
        commands.append(CommandSpec("setFields"))
    commands.append(CommandSpec(solver))
    files = sorted(p for p in reqs.required_files if p not in known)
    warnings = (f"fallback plan used: {reason}",) if reason else ()
    return ExecutionPlan(
        files_to_generate=tuple(files),
        commands=tuple(commands),
        solver=solver,
        copies=tuple(p for p, _ in task.provided_files),
        source="fallback",
        warnings=warnings,
    )


def build_plan(task: TaskSpec, backend, recorder: Optional[Recorder] = None,
               prompt: Optional[str] = None) -> ExecutionPlan:
    """One model call for a JSON plan; malformed plans fall back to the registry."""
    req = plan_request(task, backend.config.model, prompt)
    resp = send_chat(backend, req)
    if recorder is not None:
        recorder("plan", req, resp)
    try:
        return parse_plan(resp.content, task)
    except MalformedPlan as exc:
        log.warning("task %s: %s; using fallback plan", task.id, exc)
        return fallback_plan(task, str(exc))
