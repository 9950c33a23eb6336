from __future__ import annotations

import json
from pathlib import Path

import pytest

from foamgpt.case import TaskSpec, load_case
from foamgpt.llm import BackendConfig, ScriptedBackend, default_pricing, pricing_for

DATA = Path(__file__).resolve().parents[1] / "src" / "foamgpt" / "data"
TUTORIALS = DATA / "tutorials"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def files_reply(case, paths) -> str:
    return "".join(f"FILE: {p}\n```\n{case.text_of(p)}\n```\n\n" for p in paths)


def scripted(responses, model: str = "qwen-max") -> ScriptedBackend:
    cfg = BackendConfig(kind="scripted", model=model, script_path="inline")
    return ScriptedBackend(cfg, pricing_for(model, default_pricing()), list(responses))


@pytest.fixture(scope="session")
def cavity():
    return load_case(TUTORIALS / "cavity")


@pytest.fixture(scope="session")
def dambreak():
    return load_case(TUTORIALS / "damBreak")


@pytest.fixture
def cavity_task(cavity):
    return TaskSpec(id="cavity-noop", kind="modify", description="Re-emit fvSolution unchanged.",
                    baseline_case=cavity, solver_hint="icoFoam")


@pytest.fixture(scope="session")
def fvsolution_replies(cavity):
    """(good, bad): bad swaps the p solver to GAMG without a smoother."""
    good = files_reply(cavity, ["system/fvSolution"])
    bad = good.replace("solver          PCG;", "solver          GAMG;", 1)
    assert bad != good
    return good, bad


@pytest.fixture(scope="session")
def icofoam_plan():
    return json.dumps({"solver": "icoFoam", "commands": ["blockMesh", "icoFoam"],
                       "files": ["system/fvSolution"]})


# (criterion, passed, detail) rows appended by test_acceptance.py
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
