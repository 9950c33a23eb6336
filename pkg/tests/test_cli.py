from __future__ import annotations

import json

import pytest

from foamgpt.cli import main, provided_files
from foamgpt.config import ConfigError, load_config

from conftest import DATA, FIXTURES, TUTORIALS, files_reply

CAVITY_FILES = ["0/U", "0/p", "constant/transportProperties", "system/blockMeshDict",
                "system/controlDict", "system/fvSchemes", "system/fvSolution"]
CAVITY_PLAN = json.dumps({"solver": "icoFoam", "commands": ["blockMesh", "icoFoam"],
                          "files": CAVITY_FILES})


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)  # no stray ./foamgpt.json


def script(tmp_path, name, responses):
    path = tmp_path / name
    path.write_text(json.dumps(responses))
    return str(path)


# -- generate

def test_generate_cavity_with_scripted_backend(tmp_path, cavity, capsys):
    path = script(tmp_path, "cavity.json", [CAVITY_PLAN, files_reply(cavity, CAVITY_FILES)])
    code = main(["generate", "Lid-driven cavity at Re 10", "--script", path, "--runner", "mock",
                 "--out", str(tmp_path / "run")])
    assert code == 0
    out = capsys.readouterr().out
    assert "outcome: success" in out and "iterations: 1" in out
    assert (tmp_path / "run/case/system/controlDict").is_file()
    assert (tmp_path / "run/record.json").is_file()


def test_generate_never_succeeding_exits_2(tmp_path, cavity, capsys):
    bad = files_reply(cavity, CAVITY_FILES).replace("solver          PCG;", "solver          GAMG;", 1)
    path = script(tmp_path, "bad.json", [CAVITY_PLAN] + [bad] * 25)
    code = main(["generate", "cavity", "--script", path, "--out", str(tmp_path / "run")])
    assert code == 2
    assert "iterations: 20" in capsys.readouterr().out
    assert (tmp_path / "run/iter_20").is_dir() and not (tmp_path / "run/iter_21").exists()


def test_generate_exhausted_script_exits_3(tmp_path, capsys):
    path = script(tmp_path, "short.json", [CAVITY_PLAN])
    assert main(["generate", "cavity", "--script", path, "--out", str(tmp_path / "run")]) == 3


def test_generate_usage_errors(tmp_path, capsys):
    assert main(["generate", "x", "--backend", "no-such-backend"]) == 64
    assert "unknown backend" in capsys.readouterr().err
    assert main(["generate", "x", "--provide", str(tmp_path / "missing")]) == 66
    with pytest.raises(SystemExit) as info:
        main(["generate"])
    assert info.value.code == 64


def test_generate_missing_api_key(monkeypatch, tmp_path):
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    assert main(["generate", "x", "--backend", "gpt-4o", "--out", str(tmp_path / "r")]) == 3


def test_provided_file_destinations():
    mesh = DATA / "generation/airfoil/provided/constant/polyMesh"
    assert {p for p, _ in provided_files(str(mesh))} >= {"constant/polyMesh/boundary"}
    bmd = DATA / "generation/bubble/provided/system/blockMeshDict"
    assert provided_files(str(bmd))[0][0] == "system/blockMeshDict"
    assert provided_files(f"system/other={bmd}")[0][0] == "system/other"


# -- validate

def test_validate_pristine_cavity(capsys):
    assert main(["validate", str(TUTORIALS / "cavity")]) == 0
    assert "0 fatal" in capsys.readouterr().out


def test_validate_missing_p_rgh(capsys):
    assert main(["validate", str(FIXTURES / "taxonomy/no_p_rgh/negative")]) == 1
    assert '[Fatal R2] 0/p_rgh: cannot find file "0/p_rgh"' in capsys.readouterr().out


def test_validate_empty_and_missing_dirs(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    assert main(["validate", str(tmp_path / "empty")]) == 1
    assert "system/controlDict" in capsys.readouterr().out
    assert main(["validate", str(tmp_path / "nope")]) == 66


def test_validate_with_explicit_solver(capsys):
    assert main(["validate", str(TUTORIALS / "pitzDaily"), "--solver", "pimpleFoam"]) == 1
    assert "PIMPLE" in capsys.readouterr().out


# -- bench

def test_bench_generate_oracle(tmp_path, capsys):
    assert main(["oracle", "generate", "--out", str(tmp_path / "scripts")]) == 0
    capsys.readouterr()
    assert main(["bench", "generate", "--script", str(tmp_path / "scripts"),
                 "--out", str(tmp_path / "b")]) == 0
    table = capsys.readouterr().out.splitlines()
    assert table[0] == "| case | file provided | iterations | result | total token | token cost |"
    assert len(table) == 8 and all("| ✓ |" in row for row in table[2:])
    assert (tmp_path / "b/generate/report.md").read_text().splitlines() == table
    assert (tmp_path / "b/generate/report.csv").is_file()


def test_bench_parallel_matches_serial(tmp_path, capsys):
    main(["oracle", "generate", "--out", str(tmp_path / "scripts")])
    capsys.readouterr()
    outputs = []
    for n in ("1", "4"):
        main(["bench", "generate", "--script", str(tmp_path / "scripts"), "--parallel", n,
              "--out", str(tmp_path / f"p{n}")])
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]


def test_bench_bad_inputs(tmp_path, capsys):
    assert main(["bench", str(tmp_path / "nope.suite.json")]) == 66
    bad = tmp_path / "bad.suite.json"
    bad.write_text(json.dumps({"name": "x", "tasks": [{"id": "a"}]}))
    assert main(["bench", str(bad)]) == 65
    assert main(["bench", "generate", "--parallel", "0"]) == 64


# -- cost

@pytest.mark.parametrize("model, text", [
    ("o1", "$75.000000"), ("gpt-4o", "$12.500000"), ("DeepSeek-V3", "$0.585000"),
    ("qwen-max", "$2.000000"),
])
def test_cost_million_million(model, text, capsys):
    assert main(["cost", "--model", model, "--input", "1000000", "--output", "1000000"]) == 0
    assert capsys.readouterr().out.strip() == text


def test_cost_zero_and_unknown(capsys):
    assert main(["cost", "--model", "o1", "--input", "0", "--output", "0"]) == 0
    assert capsys.readouterr().out.strip() == "$0"
    assert main(["cost", "--model", "gpt-5", "--input", "1", "--output", "1"]) == 64
    err = capsys.readouterr().err
    assert "gpt-4o" in err and "qwen-max" in err


# -- parse and oracle

def test_parse_dumps_ast(capsys):
    assert main(["parse", str(TUTORIALS / "cavity/system/controlDict")]) == 0
    tree = json.loads(capsys.readouterr().out)
    assert tree["type"] == "FoamFile"
    assert ["application", {"type": "Atom", "text": "icoFoam"}] in tree["body"]["entries"]


def test_parse_errors(tmp_path, capsys):
    bad = tmp_path / "controlDict"
    bad.write_text("no header here;")
    assert main(["parse", str(bad)]) == 65
    assert main(["parse", str(tmp_path / "missing")]) == 66


def test_oracle_skip(tmp_path, capsys):
    assert main(["oracle", "modify", "--out", str(tmp_path / "s"), "--skip", "cavity-mesh"]) == 0
    assert len(list((tmp_path / "s").glob("*.json"))) == 19
    assert main(["oracle", "modify", "--out", str(tmp_path / "s"), "--skip", "nope"]) == 64


# -- config

def test_config_file_and_flag_precedence(tmp_path, cavity, capsys):
    cfg = tmp_path / "foamgpt.json"
    cfg.write_text(json.dumps({
        "default_backend": "replay",
        "backends": {"replay": {"kind": "scripted", "model": "o1",
                                "script_path": script(tmp_path, "s.json", [CAVITY_PLAN])}},
        "limits": {"max_iterations": 3},
    }))
    app = load_config()
    assert app.default_backend == "replay" and app.limits.max_iterations == 3
    assert "gpt-4o" in app.backends  # built-ins stay available
    good = script(tmp_path, "good.json", [CAVITY_PLAN, files_reply(cavity, CAVITY_FILES)])
    assert main(["generate", "x", "--script", good, "--out", str(tmp_path / "r")]) == 0
    assert json.loads((tmp_path / "r/record.json").read_text())["backend_model"] == "o1"


def test_bad_config(tmp_path, capsys):
    (tmp_path / "c.json").write_text(json.dumps({"default_backend": "missing"}))
    with pytest.raises(ConfigError):
        load_config(tmp_path / "c.json")
    assert main(["--config", str(tmp_path / "c.json"), "cost", "--model", "o1",
                 "--input", "1", "--output", "1"]) == 64
    assert main(["--config", str(tmp_path / "absent.json"), "validate", "."]) == 64
