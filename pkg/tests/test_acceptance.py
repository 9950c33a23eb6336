"""Desk-scale acceptance criteria, each printed as one PASS/FAIL line in the summary.

Pinned tolerances: corpus round trip under 1 s; each loop-cap scenario under
5 s; costs exact to the micro-USD; request estimates at most floor(0.8 * 32768)
= 26214 tokens.
"""

from __future__ import annotations

import json
import random
import re
import time
from decimal import Decimal
from pathlib import Path

import pytest

from foamgpt.agent import MockRunner, run_agent
from foamgpt.agent.retry import compose_retry, implicated_file
from foamgpt.agent.types import ErrorReport, TrialRecord
from foamgpt.bench import (
    COLUMNS,
    BenchConfig,
    bundled_suite_path,
    load_suite,
    render_table,
    run_suite,
    write_oracle_scripts,
)
from foamgpt.case import CaseTree, ParsedFile, TaskSpec, load_case, required_artifacts, validate_case
from foamgpt.foamdict import parse_foam_file, serialize_foam_file
from foamgpt.llm import (
    BackendConfig,
    UsageTotals,
    compute_cost,
    default_pricing,
    estimate_request,
    find_pricing,
)
from foamgpt.llm.pricing import usd_to_micro

from conftest import ACCEPTANCE, DATA, FIXTURES, scripted

LOOP_SECONDS = 5.0
PARSE_SECONDS = 1.0
CONTEXT_32K = 32768
BUDGET_32K = 26214
FILE_HEADER = re.compile(r"^FILE: (\S+)\n```", re.M)


def verdict(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.append((name, passed, detail))
    assert passed, f"{name}: {detail}"


# -- parser fidelity

REQUIRED_KINDS = ("controlDict", "fvSolution", "fvSchemes", "blockMeshDict", "setFieldsDict",
                  "turbulenceProperties", "boundary", "field")
FIELD_CLASSES = ("volScalarField", "volVectorField")


def _kind(path: Path, foam) -> str:
    if foam.class_name in FIELD_CLASSES:
        return "field"
    return path.name.split(".")[0]


def test_parser_fidelity():
    corpus = [p for d in ("tutorials", "generation") for p in sorted((DATA / d).rglob("*"))
              if p.is_file() and "FoamFile" in p.read_text("utf-8")]
    texts = [(p, p.read_text("utf-8")) for p in corpus]
    failures, kinds = [], set()
    start = time.perf_counter()
    for path, text in texts:
        first = parse_foam_file(text)
        if parse_foam_file(serialize_foam_file(first)) != first:
            failures.append(path.name)
        kinds.add(_kind(path, first))
    elapsed = time.perf_counter() - start
    missing = [k for k in REQUIRED_KINDS if k not in kinds]
    ok = len(texts) >= 15 and not failures and not missing and elapsed < PARSE_SECONDS
    verdict("parser fidelity", ok,
            f"{len(texts)} dictionaries, {len(failures)} failures, missing kinds {missing}, "
            f"{elapsed:.3f} s (limit {PARSE_SECONDS} s)")


# -- loop-cap semantics

@pytest.fixture(scope="module")
def loop_setup():
    cavity = load_case(DATA / "tutorials" / "cavity")
    good = f"FILE: system/fvSolution\n```\n{cavity.text_of('system/fvSolution')}\n```\n"
    bad = good.replace("solver          PCG;", "solver          GAMG;", 1)
    plan = json.dumps({"solver": "icoFoam", "commands": ["blockMesh", "icoFoam"],
                       "files": ["system/fvSolution"]})
    task = TaskSpec(id="cap", kind="modify", description="Re-emit system/fvSolution.",
                    baseline_case=cavity, solver_hint="icoFoam")
    return task, plan, good, bad


def _timed_run(task, responses, workdir):
    start = time.perf_counter()
    record = run_agent(task, scripted(responses), MockRunner(), workdir)
    return record, time.perf_counter() - start


def test_loop_cap(loop_setup, tmp_path):
    task, plan, good, bad = loop_setup
    lines, ok = [], True
    for k in (1, 3, 19):
        record, secs = _timed_run(task, [plan] + [bad] * (k - 1) + [good], tmp_path / f"k{k}")
        hit = record.outcome == "success" and record.iterations_used == k and secs < LOOP_SECONDS
        ok &= hit
        lines.append(f"k={k}: {record.iterations_used} ({secs:.2f} s)")
    record, secs = _timed_run(task, [plan] + [bad] * 30, tmp_path / "never")
    never = record.outcome == "failed_max_iterations" and record.iterations_used == 20
    ok &= never and secs < LOOP_SECONDS
    lines.append(f"never: {record.outcome} at {record.iterations_used} ({secs:.2f} s)")
    verdict("loop cap", ok, "; ".join(lines))


# -- failure taxonomy

TAXONOMY = {
    "patch_empty": ("icoFoam", "R1", "patch type 'patch' not constraint type 'empty'"),
    "no_smoother": ("icoFoam", "R3", "keyword smoother is undefined"),
    "no_p_rgh": ("interFoam", "R2", 'cannot find file "0/p_rgh"'),
}


def test_failure_taxonomy():
    details, ok = [], True
    for name, (solver, rule, text) in TAXONOMY.items():
        reqs = required_artifacts(solver)
        neg = validate_case(load_case(FIXTURES / "taxonomy" / name / "negative"), reqs)
        pos = validate_case(load_case(FIXTURES / "taxonomy" / name / "positive"), reqs)
        hit = (len(neg) == 1 and neg[0].rule_id == rule and neg[0].severity == "Fatal"
               and text in neg[0].message and pos == [])
        ok &= hit
        details.append(f"{name}: {[v.rule_id for v in neg]} / {[v.rule_id for v in pos]}")
    verdict("failure taxonomy", ok, "; ".join(details))


# -- cost arithmetic

COSTS = {"GPT-4o": "12.50", "o1": "75.00", "DeepSeek-V3": "0.585", "Qwen 2.5-Max": "2.00"}


def test_cost_arithmetic():
    table = default_pricing()
    got = {name: compute_cost(UsageTotals(10**6, 10**6), find_pricing(name, table))
           for name in COSTS}
    ok = all(got[name] == usd_to_micro(usd) for name, usd in COSTS.items())
    verdict("cost arithmetic", ok,
            ", ".join(f"{n} {Decimal(got[n]) / 10**6} (want {COSTS[n]})" for n in COSTS))


# -- modification suite encoding

def _bench(suite, scripts: Path, out: Path, parallelism: int = 1):
    cfg = BackendConfig(kind="scripted", model="qwen-max", script_path=str(scripts), name="oracle")
    return run_suite(suite, BenchConfig((cfg,), out, parallelism=parallelism))


def test_modify_suite_discrimination(tmp_path):
    suite = load_suite(bundled_suite_path("modify"))
    write_oracle_scripts(suite, tmp_path / "good")
    write_oracle_scripts(suite, tmp_path / "skip", skip=frozenset(t.id for t in suite.tasks))
    good = _bench(suite, tmp_path / "good", tmp_path / "run-good", parallelism=4)
    skip = _bench(suite, tmp_path / "skip", tmp_path / "run-skip", parallelism=4)
    passed = sum(r.outcome == "success" and r.check_passed for r in good)
    caught = sum(r.outcome != "success" for r in skip)
    ok = len(suite.tasks) == 19 and passed == 19 and caught == 19
    verdict("modification suite", ok,
            f"{len(suite.tasks)} tasks; oracle {passed}/19 succeed; skip-edit {caught}/19 fail")


# -- report schema

def _published_record(task, index) -> TrialRecord:
    published = task.expected["published"]
    failed = published["result"] != "success"
    return TrialRecord(
        task_id=task.id, backend_model="qwen-max", backend="qwen-max",
        iterations_used=published["iterations"],
        outcome="failed_max_iterations" if failed else "success",
        usage=UsageTotals(published["tokens"], 0), cost=usd_to_micro(published["cost_usd"]),
        final_error=ErrorReport("fatal_pattern", published["result"], "solver") if failed else None,
        case_label=task.label, files_provided=task.files_provided_label(), suite_index=index)


def test_report_schema():
    suite = load_suite(bundled_suite_path("generate"))
    records = [_published_record(t, i) for i, t in enumerate(suite.tasks)]
    lines = render_table(records).splitlines()
    header = [c.strip() for c in lines[0].strip("|").split("|")]
    rows = {r.split("|")[1].strip(): [c.strip() for c in r.strip("|").split("|")] for r in lines[2:]}
    bubble = rows["Bubble"]
    ok = (tuple(header) == COLUMNS and len(rows) == 6
          and bubble == ["Bubble", "blockMeshDict, setFieldsDict", "8", "✓", "71k", "$0.25"]
          and rows["AirFoil"][2:] == ["2", "✓", "15k", "$0.056"]
          and rows["MotorBike"][3] == "patch type 'patch' not constraint type 'empty'")
    verdict("report rendering", ok, f"Bubble row: {' | '.join(bubble[2:])}")


# -- budget invariant

def _big_dict(name: str, n: int, rng: random.Random) -> str:
    values = " ".join(f"{rng.random():.6f}" for _ in range(n))
    return ("FoamFile\n{\n    version 2.0;\n    format ascii;\n    class dictionary;\n"
            f"    object {name};\n}}\n\nvalues ( {values} );\n")


@pytest.fixture(scope="module")
def budget_pool():
    rng = random.Random(20240917)
    base = [load_case(d) for d in sorted((DATA / "tutorials").iterdir())]
    extra = []
    for i in range(24):
        n = rng.choice([50, 500, 5_000, 20_000, 40_000])
        folder = rng.choice(["constant", "system", "0", "constant/polyMesh"])
        name = "blockMeshDict" if folder == "system" and i % 3 == 0 else f"extra{i}"
        extra.append((f"{folder}/{name}", _big_dict(name, n, rng)))
    parsed = CaseTree()
    for path, text in extra:
        parsed = parsed.with_text(path, text)
    return base, list(parsed.entries.items())


def test_budget_invariant(budget_pool):
    base, extras = budget_pool
    pricing = find_pricing("qwen-max", default_pricing())
    rng = random.Random(7)
    worst, violations, missing, shown_cases = 0, 0, 0, 0
    for i in range(1000):
        case = rng.choice(base)
        picks = rng.sample(extras, rng.randint(0, 6))
        case = CaseTree({**case.entries, **dict(picks)}, case.root_name)
        paths = list(case)
        target = rng.choice(paths)
        lines = [f"error line {j}: {'x' * rng.randint(0, 200)}" for j in range(rng.randint(1, 3000))]
        lines.insert(rng.randrange(len(lines) + 1), f"file: {target}")
        err = ErrorReport("fatal_pattern", "\n".join(lines), "solver",
                          keyword=rng.choice([None, target.rsplit("/", 1)[-1]]))
        task = TaskSpec(id=f"b{i}", kind="generate", description="Budget probe " * rng.randint(1, 50))
        req = compose_retry(task, case, err, pricing)
        used = estimate_request(req)
        worst = max(worst, used)
        violations += used > BUDGET_32K
        user = req.messages[-1].content
        keep = implicated_file(case, err)
        shown = FILE_HEADER.findall(user)
        if shown:
            shown_cases += 1
            if isinstance(case.get(keep), ParsedFile):
                missing += keep not in shown
            elif keep is not None:  # mesh blobs are never inlined, only named
                missing += "Present but not shown (binary or mesh data): " not in user or keep not in user
    ok = pricing.context_length == CONTEXT_32K and violations == 0 and missing == 0
    verdict("budget invariant", ok,
            f"1000 requests, max {worst} tokens (limit {BUDGET_32K}), {violations} over, "
            f"implicated file missing in {missing} of {shown_cases} requests with files")


# -- determinism

def _lines(path: Path) -> list[str]:
    return path.read_text("utf-8").splitlines()


def test_determinism(tmp_path):
    suites = [load_suite(bundled_suite_path(n)) for n in ("modify", "generate")]
    for s in suites:
        write_oracle_scripts(s, tmp_path / "scripts" / s.name)
    runs = {}
    for label, par in (("a", 1), ("b", 1), ("c", 4), ("d", 4)):
        out = tmp_path / label
        for s in suites:
            _bench(s, tmp_path / "scripts" / s.name, out, parallelism=par)
        runs[label] = {s.name: (out / s.name / "results.jsonl").read_bytes() for s in suites}
    serial_same = runs["a"] == runs["b"]
    multiset = all(sorted(_lines(tmp_path / x / s.name / "results.jsonl"))
                   == sorted(_lines(tmp_path / "a" / s.name / "results.jsonl"))
                   for x in ("c", "d") for s in suites)
    count = sum(len(_lines(tmp_path / "a" / s.name / "results.jsonl")) for s in suites)
    verdict("determinism", serial_same and multiset and count == 25,
            f"{count} records; parallelism 1 byte-identical: {serial_same}; "
            f"parallelism 4 same multiset: {multiset}")


@pytest.mark.skip(reason="live mode needs API credentials and an OpenFOAM-v2406 install")
def test_live_cavity():
    """Run `foamgpt generate` on the cavity task with a real backend and RealRunner."""
