"""``foamgpt`` command line: generate, validate, bench, cost, parse, oracle.

Exit codes: 0 ok, 1 fatal violations, 2 iteration cap reached, 3 unrecoverable
failure, 64 usage error, 65 bad input data, 66 missing input.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .agent import MockRunner, RealRunner, run_agent
from .bench import (
    BenchConfig,
    MissingFixture,
    SchemaError,
    bench_order,
    bundled_suite_path,
    load_suite,
    render_table,
    run_suite,
    write_oracle_scripts,
)
from .case import TaskSpec, fatal, load_case, required_artifacts, validate_case
from .case.rules import word
from .config import AppConfig, ConfigError, load_config
from .foamdict import FoamParseError, parse_foam_file
from .foamdict.ast import Atom, DimensionSet, Dict, FoamFile, List, Number, Raw, Seq, Vector
from .llm import BackendConfig, BackendError, UsageTotals, compute_cost, find_pricing, format_usd, make_backend

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_MAX_ITERATIONS = 2
EXIT_UNRECOVERABLE = 3
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_NOINPUT = 66

OUTCOME_EXIT = {
    "success": EXIT_OK,
    "failed_max_iterations": EXIT_MAX_ITERATIONS,
    "failed_unrecoverable": EXIT_UNRECOVERABLE,
}

# Files a bare ``--provide`` path may name without saying where it goes.
SYSTEM_DICTS = {"blockMeshDict", "setFieldsDict", "snappyHexMeshDict", "controlDict",
                "fvSchemes", "fvSolution", "decomposeParDict", "topoSetDict"}
CASE_DIRS = ("0", "constant", "system")

log = logging.getLogger("foamgpt")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2, which means "iteration cap" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _err(msg: str) -> None:
    print(f"foamgpt: {msg}", file=sys.stderr)


# ---------------------------------------------------------------- generate

def provided_files(spec: str) -> list[tuple[str, bytes]]:
    """Resolve one ``--provide`` argument, ``SRC`` or ``DEST=SRC``, to case files."""
    dest, _, src = spec.rpartition("=")
    path = Path(src)
    if not path.exists():
        raise FileNotFoundError(src)
    if path.is_dir():
        files = sorted(p for p in path.rglob("*") if p.is_file())
        if not dest:
            if path.name == "polyMesh":
                dest = "constant/polyMesh"
            elif any((path / d).is_dir() for d in CASE_DIRS):
                dest = ""
            else:
                raise UsageError(f"cannot tell where directory {src} belongs; use DEST={src}")
        prefix = f"{dest.strip('/')}/" if dest else ""
        return [(prefix + p.relative_to(path).as_posix(), p.read_bytes()) for p in files]
    if not dest:
        if path.parent.name in CASE_DIRS:
            dest = f"{path.parent.name}/{path.name}"
        elif path.name in SYSTEM_DICTS:
            dest = f"system/{path.name}"
        else:
            raise UsageError(f"cannot tell where {src} belongs; use DEST={src}")
    return [(dest, path.read_bytes())]


def _backend(app: AppConfig, name: Optional[str], script: Optional[str]) -> BackendConfig:
    cfg = app.backend(name or app.default_backend)
    if script is None:
        return cfg
    return BackendConfig(kind="scripted", model=cfg.model, script_path=script, name=cfg.label)


def _system_prompt(app: AppConfig) -> Optional[str]:
    if app.system_prompt_path is None:
        return None
    return app.system_prompt_path.read_text("utf-8")


def cmd_generate(args, app: AppConfig) -> int:
    provided: list[tuple[str, bytes]] = []
    for spec in args.provide:
        try:
            provided.extend(provided_files(spec))
        except FileNotFoundError as exc:
            _err(f"provided file not found: {exc}")
            return EXIT_NOINPUT
    baseline = None
    if args.baseline:
        if not Path(args.baseline).is_dir():
            _err(f"baseline case not found: {args.baseline}")
            return EXIT_NOINPUT
        baseline = load_case(args.baseline)
    limits = app.limits
    if args.max_iterations is not None:
        if args.max_iterations < 1:
            raise UsageError("--max-iterations must be >= 1")
        limits = type(limits)(args.max_iterations, limits.per_run_wall_seconds,
                              limits.token_budget_fraction)
    task = TaskSpec(
        id="generate",
        kind="modify" if baseline is not None else "generate",
        description=args.description,
        baseline_case=baseline,
        provided_files=tuple(provided),
        solver_hint=args.solver,
        limits=limits,
    )
    cfg = _backend(app, args.backend, args.script)
    try:
        backend = make_backend(cfg, app.pricing_table)
    except (BackendError, OSError, ValueError) as exc:
        _err(f"cannot create backend {cfg.label}: {exc}")
        return EXIT_UNRECOVERABLE
    runner_kind = args.runner or app.runner
    runner = MockRunner() if runner_kind == "mock" else RealRunner(limits.per_run_wall_seconds)
    out = Path(args.out)
    record = run_agent(task, backend, runner, out, system_prompt=_system_prompt(app))
    # an unrecoverable error can end iteration k before iter_k is written
    written = [out / f"iter_{k}" for k in range(record.iterations_used, 0, -1)
               if (out / f"iter_{k}").is_dir()]
    case_dir = out / "case"
    if written:
        if case_dir.exists():
            shutil.rmtree(case_dir)
        shutil.copytree(written[0], case_dir)
    print(f"outcome: {record.outcome}")
    print(f"iterations: {record.iterations_used}")
    print(f"tokens: {record.usage.total} (in {record.usage.input_tokens}, "
          f"out {record.usage.output_tokens})")
    print(f"cost: {format_usd(record.cost)}")
    if record.final_error is not None and record.outcome != "success":
        print(f"error: {record.final_error.head()}")
    if written:
        print(f"case: {case_dir}")
    return OUTCOME_EXIT.get(record.outcome, EXIT_UNRECOVERABLE)


# ---------------------------------------------------------------- validate

def cmd_validate(args, app: AppConfig) -> int:
    case_dir = Path(args.case_dir)
    if not case_dir.is_dir():
        _err(f"case directory not found: {case_dir}")
        return EXIT_NOINPUT
    case = load_case(case_dir)
    solver = args.solver
    if solver is None:
        cd = case.foam("system/controlDict")
        solver = word(cd.body.get("application")) if cd is not None else None
    violations = validate_case(case, required_artifacts(solver or "unknown"))
    for v in violations:
        print(v)
    bad = fatal(violations)
    print(f"{len(bad)} fatal, {len(violations) - len(bad)} warning")
    return EXIT_FATAL if bad else EXIT_OK


# ---------------------------------------------------------------- bench

def _suite_path(arg: str) -> Path:
    path = Path(arg)
    if not path.exists() and "/" not in arg and not arg.endswith(".json"):
        bundled = bundled_suite_path(arg)
        if bundled.is_file():
            return bundled
    return path


def cmd_bench(args, app: AppConfig) -> int:
    path = _suite_path(args.suite)
    if not path.is_file():
        _err(f"suite not found: {args.suite}")
        return EXIT_NOINPUT
    try:
        suite = load_suite(path)
    except SchemaError as exc:
        _err(f"invalid suite: {exc}")
        return EXIT_DATAERR
    except MissingFixture as exc:
        _err(str(exc))
        return EXIT_NOINPUT
    names = args.backend or [app.default_backend]
    backends = []
    for name in names:
        cfg = app.backend(name)
        if args.script:
            script = Path(args.script) if len(names) == 1 else Path(args.script) / cfg.label
            cfg = BackendConfig(kind="scripted", model=cfg.model, script_path=str(script),
                                name=cfg.label)
        backends.append(cfg)
    if args.parallel < 1 or args.repeat < 1:
        raise UsageError("--parallel and --repeat must be >= 1")
    bench = BenchConfig(
        backends=tuple(backends),
        output_dir=Path(args.out),
        runner=args.runner or app.runner,
        parallelism=args.parallel,
        repeat=args.repeat,
        pricing_table=app.pricing_table,
        system_prompt=_system_prompt(app),
    )
    records = bench_order(run_suite(suite, bench))
    table = render_table(records, args.format)
    report_dir = Path(args.out) / suite.name
    (report_dir / "report.md").write_text(render_table(records, "markdown"), encoding="utf-8")
    (report_dir / "report.csv").write_text(render_table(records, "csv"), encoding="utf-8")
    sys.stdout.write(table)
    return EXIT_OK


# ---------------------------------------------------------------- cost

def cmd_cost(args, app: AppConfig) -> int:
    if args.input < 0 or args.output < 0:
        raise UsageError("token counts must be >= 0")
    row = find_pricing(args.model, app.pricing_table)
    if row is None:
        known = ", ".join(p.model for p in app.pricing_table)
        _err(f"unknown model {args.model!r}; known models: {known}")
        return EXIT_USAGE
    print(format_usd(compute_cost(UsageTotals(args.input, args.output), row)))
    return EXIT_OK


# ---------------------------------------------------------------- parse

def to_jsonable(node):
    """AST node -> plain JSON tree tagged with the node type."""
    if isinstance(node, FoamFile):
        return {"type": "FoamFile", "header": to_jsonable(node.header), "body": to_jsonable(node.body)}
    if isinstance(node, Dict):
        return {"type": "Dict", "entries": [[k, to_jsonable(v)] for k, v in node.entries]}
    if isinstance(node, Atom):
        return {"type": "Atom", "text": node.text}
    if isinstance(node, Number):
        return {"type": "Number", "lexeme": node.lexeme}
    if isinstance(node, Raw):
        return {"type": "Raw", "text": node.text}
    if isinstance(node, (DimensionSet, Vector)):
        items = node.exponents if isinstance(node, DimensionSet) else node.components
        return {"type": type(node).__name__, "values": [n.lexeme for n in items]}
    if isinstance(node, List):
        return {"type": "List", "size_prefixed": node.size_prefixed,
                "items": [to_jsonable(v) for v in node.items]}
    if isinstance(node, Seq):
        return {"type": "Seq", "items": [to_jsonable(v) for v in node.items]}
    if is_dataclass(node):  # future node kinds still dump something readable
        return {"type": type(node).__name__,
                **{f.name: str(getattr(node, f.name)) for f in fields(node)}}
    raise TypeError(f"not an AST node: {node!r}")


def cmd_parse(args, app: AppConfig) -> int:
    path = Path(args.file)
    if not path.is_file():
        _err(f"file not found: {path}")
        return EXIT_NOINPUT
    try:
        parsed = parse_foam_file(path.read_text("utf-8"), source_path=str(path))
    except FoamParseError as exc:
        _err(str(exc))
        return EXIT_DATAERR
    json.dump(to_jsonable(parsed), sys.stdout, indent=1 if args.pretty else None)
    sys.stdout.write("\n")
    return EXIT_OK


# ---------------------------------------------------------------- oracle

def cmd_oracle(args, app: AppConfig) -> int:
    path = _suite_path(args.suite)
    if not path.is_file():
        _err(f"suite not found: {args.suite}")
        return EXIT_NOINPUT
    try:
        suite = load_suite(path)
    except SchemaError as exc:
        _err(f"invalid suite: {exc}")
        return EXIT_DATAERR
    except MissingFixture as exc:
        _err(str(exc))
        return EXIT_NOINPUT
    ids = {t.id for t in suite.tasks}
    skip = ids if args.skip_all else set(args.skip)
    unknown = skip - ids
    if unknown:
        raise UsageError(f"unknown task ids: {', '.join(sorted(unknown))}")
    try:
        written = write_oracle_scripts(suite, args.out, skip=frozenset(skip))
    except KeyError as exc:
        _err(f"no oracle fixture: {exc}")
        return EXIT_NOINPUT
    print(f"wrote {len(written)} scripts to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- entry

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="foamgpt", description="Generate, validate and repair OpenFOAM cases with an LLM.")
    p.add_argument("--config", help="JSON config file (default ./foamgpt.json when present)")
    p.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    p.add_argument("--version", action="version", version=f"foamgpt {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="build a case from a description and run it")
    g.add_argument("description")
    g.add_argument("--provide", action="append", default=[], metavar="[DEST=]SRC",
                   help="user-supplied file or directory (mesh, blockMeshDict, ...)")
    g.add_argument("--baseline", help="existing case to modify instead of generating")
    g.add_argument("--solver", help="solver to use instead of letting the model pick")
    g.add_argument("--backend", help="backend name from the config")
    g.add_argument("--script", help="replay a JSON list of responses instead of calling the API")
    g.add_argument("--runner", choices=("mock", "real"))
    g.add_argument("--max-iterations", type=int)
    g.add_argument("--out", default="foamgpt-out")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", help="static checks on a case directory")
    v.add_argument("case_dir")
    v.add_argument("--solver", help="defaults to application in system/controlDict")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="run a task suite and print the results table")
    b.add_argument("suite", help="suite JSON path or bundled name (modify, generate)")
    b.add_argument("--backend", action="append", help="backend name; repeat for several")
    b.add_argument("--script", help="script file or directory of <task_id>.json scripts; with "
                                    "several backends, a directory with one subdirectory each")
    b.add_argument("--runner", choices=("mock", "real"))
    b.add_argument("--parallel", type=int, default=1)
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    b.add_argument("--out", default="foamgpt-bench")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("cost", help="price a token count")
    c.add_argument("--model", required=True)
    c.add_argument("--input", type=int, required=True, help="input tokens")
    c.add_argument("--output", type=int, required=True, help="output tokens")
    c.set_defaults(func=cmd_cost)

    pa = sub.add_parser("parse", help="dump a dictionary file's AST as JSON")
    pa.add_argument("file")
    pa.add_argument("--pretty", action="store_true")
    pa.set_defaults(func=cmd_parse)

    o = sub.add_parser("oracle", help="write known-good scripted responses for a suite")
    o.add_argument("suite")
    o.add_argument("--out", required=True)
    o.add_argument("--skip", action="append", default=[], metavar="TASK_ID",
                   help="omit the requested edit for this task")
    o.add_argument("--skip-all", action="store_true")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        app = load_config(args.config)
        return args.func(args, app)
    except (UsageError, ConfigError) as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
