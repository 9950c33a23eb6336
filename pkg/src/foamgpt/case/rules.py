"""Static validation of a CaseTree against solver requirements and mesh constraints.

Rule ids:
    R0  dictionary syntax (file fell back to an opaque blob)
    R1  patch constraint types agree between mesh and every field
    R2  solver file requirements
    R3  keyword requirements, including 'smoother' for smoothing linear solvers
    R4  controlDict sanity
    R5  turbulence model registry and model field files
    R6  every mesh patch has a patchField entry with a type
    W1  FoamFile header object differs from the file name
    W2  controlDict application differs from the validated solver
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional

from ..foamdict import Atom, Dict, FoamFile, List, Number, Raw, Seq, lookup
from ..foamdict.access import NotADict, NotFound
from .requirements import (
    CONSTRAINT_TYPES,
    MODEL_FIELDS,
    SMOOTHED_SOLVERS,
    TURBULENCE_MODELS,
    RequirementSet,
)
from .tree import CaseTree

FATAL = "Fatal"
WARNING = "Warning"

RULES = {
    "R0": "dictionary syntax",
    "R1": "patch constraint consistency",
    "R2": "solver file requirements",
    "R3": "keyword requirements",
    "R4": "controlDict sanity",
    "R5": "turbulence model consistency",
    "R6": "patch field coverage",
    "W1": "header object name",
    "W2": "application mismatch",
}


@dataclass(frozen=True)
class Violation:
    rule_id: str
    path: str
    message: str
    severity: str = FATAL
    keyword: Optional[str] = None

    def __post_init__(self) -> None:
        if self.rule_id not in RULES:
            raise ValueError(f"unregistered rule id {self.rule_id!r}")

    def __str__(self) -> str:
        return f"[{self.severity} {self.rule_id}] {self.path}: {self.message}"


def word(value) -> Optional[str]:
    if isinstance(value, Atom):
        return value.text.strip('"')
    if isinstance(value, Number):
        return value.lexeme
    return None


def _key_regex(key: str) -> Optional[re.Pattern]:
    if len(key) >= 2 and key[0] == key[-1] == '"':
        try:
            return re.compile(key[1:-1])
        except re.error:
            return None
    return None


def resolve_key(d: Dict, name: str, groups: tuple[str, ...] = ()):
    """OpenFOAM-style lookup: exact key, then quoted regex keys (last wins),
    then patch group names."""
    if name in d:
        return d[name]
    for key, value in reversed(list(d.items())):
        rx = _key_regex(key)
        if rx is not None and rx.fullmatch(name):
            return value
    for g in groups:
        if g in d:
            return d[g]
    return None


def expand_macros(block: Dict, siblings: Dict, depth: int = 0) -> Dict:
    """Merge ``$name;`` inheritance from sibling dictionaries into ``block``."""
    if depth > 8:
        return block
    merged = Dict()
    for key, value in block.entries:
        if key is None and isinstance(value, Raw) and value.text.startswith("$"):
            ref = value.text.rstrip(";").strip()[1:]
            parent = resolve_key(siblings, ref)
            if isinstance(parent, Dict):
                for k, v in expand_macros(parent, siblings, depth + 1).entries:
                    if k is not None:
                        merged = merged.set(k, v)
            continue
        if key is not None:
            merged = merged.set(key, value)
    return merged


# ---------------------------------------------------------------- mesh patches

@dataclass(frozen=True)
class MeshPatch:
    name: str
    type: str
    groups: tuple[str, ...] = ()


def _named_dicts(items) -> Iterator[tuple[str, Dict]]:
    pending = None
    for item in items:
        if isinstance(item, Atom):
            pending = item.text
        elif isinstance(item, Dict) and pending is not None:
            yield pending, item
            pending = None


def _groups(d: Dict) -> tuple[str, ...]:
    value = d.get("inGroups")
    items = value.items if isinstance(value, Seq) else (value,)
    for item in items:
        if isinstance(item, List):
            return tuple(w for w in (word(x) for x in item.items) if w)
    return ()


def mesh_patches(case: CaseTree) -> tuple[Optional[str], list[MeshPatch]]:
    """Patches from constant/polyMesh/boundary, else from system/blockMeshDict."""
    boundary = case.foam("constant/polyMesh/boundary")
    if boundary is not None:
        patches = []
        for value in boundary.body.anonymous():
            items = value.items if isinstance(value, Seq) else (value,)
            for item in items:
                if isinstance(item, List):
                    for name, d in _named_dicts(item.items):
                        patches.append(MeshPatch(name, word(d.get("type")) or "patch", _groups(d)))
        return "constant/polyMesh/boundary", patches
    bmd = case.foam("system/blockMeshDict")
    if bmd is not None:
        patches = []
        value = bmd.body.get("boundary")
        if isinstance(value, List):
            for name, d in _named_dicts(value.items):
                patches.append(MeshPatch(name, word(d.get("type")) or "patch", _groups(d)))
        value = bmd.body.get("patches")
        if isinstance(value, List):
            # legacy form: patches ( <type> <name> ( faces ) ... )
            items = value.items
            for i in range(0, len(items) - 2, 3):
                ptype, pname = word(items[i]), word(items[i + 1])
                if ptype and pname:
                    patches.append(MeshPatch(pname, ptype))
        return "system/blockMeshDict", patches
    return None, []


def field_files(case: CaseTree) -> Iterator[tuple[str, FoamFile, Dict]]:
    for path in case:
        parts = path.split("/")
        if len(parts) != 2 or parts[0] != "0":
            continue
        foam = case.foam(path)
        if foam is None:
            continue
        bf = foam.body.get("boundaryField")
        if isinstance(bf, Dict):
            yield path, foam, bf


def _includes_constraint_types(bf: Dict) -> bool:
    return any(isinstance(v, Raw) and "setConstraintTypes" in v.text for v in bf.anonymous())


def _check_patches(case: CaseTree) -> list[Violation]:
    out: list[Violation] = []
    source, patches = mesh_patches(case)
    if source is None:
        return out
    for path, _, bf in field_files(case):
        field_name = path.split("/", 1)[1]
        for patch in patches:
            pf = resolve_key(bf, patch.name, patch.groups)
            if pf is None:
                if patch.type in CONSTRAINT_TYPES and _includes_constraint_types(bf):
                    continue
                out.append(Violation(
                    "R6", path,
                    f"Cannot find patchField entry for {patch.name} in field {field_name}",
                    keyword=patch.name))
                continue
            ptype = word(pf.get("type")) if isinstance(pf, Dict) else None
            if ptype is None:
                out.append(Violation(
                    "R6", path, f"keyword type is undefined for patch {patch.name} of field {field_name}",
                    keyword="type"))
                continue
            if patch.type in CONSTRAINT_TYPES and ptype != patch.type:
                out.append(Violation(
                    "R1", path,
                    f"inconsistent patch and patchField types for patch type '{patch.type}' and "
                    f"patchField type '{ptype}' (patch {patch.name} of field {field_name})",
                    keyword=patch.name))
            elif ptype in CONSTRAINT_TYPES and patch.type != ptype:
                out.append(Violation(
                    "R1", path,
                    f"patch type '{patch.type}' not constraint type '{ptype}' "
                    f"for patch {patch.name} of field {field_name}",
                    keyword=patch.name))
    return out


# ---------------------------------------------------------------- file requirements

def phase_substitutions(case: CaseTree) -> dict[str, str]:
    """Map registry paths written for the default phase names to this case's names."""
    subs: dict[str, str] = {}
    tp = case.foam("constant/transportProperties")
    if tp is None:
        return subs
    phases = tp.body.get("phases")
    if isinstance(phases, List) and phases.items:
        first = word(phases.items[0])
        if first:
            subs["0/alpha.water"] = f"0/alpha.{first}"
    continuous = word(tp.body.get("continuousPhase"))
    if continuous:
        subs["0/U.air"] = f"0/U.{continuous}"
    return subs


def _check_files(case: CaseTree, reqs: RequirementSet) -> list[Violation]:
    subs = phase_substitutions(case)
    out = []
    for req in sorted(reqs.required_files):
        path = subs.get(req, req)
        if path not in case:
            name = path.rsplit("/", 1)[-1]
            out.append(Violation(
                "R2", path, f'cannot find file "{path}" required by {reqs.solver}', keyword=name))
    return out


# ---------------------------------------------------------------- keywords

def _check_keywords(case: CaseTree, reqs: RequirementSet) -> list[Violation]:
    out = []
    for path, kpath in reqs.required_keywords:
        foam = case.foam(path)
        if foam is None:
            continue
        try:
            lookup(foam.body, kpath)
        except (NotFound, NotADict):
            leaf = kpath.rsplit("/", 1)[-1]
            out.append(Violation(
                "R3", path, f'keyword {leaf} is undefined in dictionary "{path}"', keyword=leaf))
    fv = case.foam("system/fvSolution")
    solvers = fv.body.get("solvers") if fv is not None else None
    if isinstance(solvers, Dict):
        for key, block in solvers.items():
            if not isinstance(block, Dict) or "solver" not in block:
                continue
            resolved = expand_macros(block, solvers)
            name = word(resolved.get("solver"))
            if name in SMOOTHED_SOLVERS and "smoother" not in resolved:
                out.append(Violation(
                    "R3", "system/fvSolution",
                    f'keyword smoother is undefined in dictionary "system/fvSolution/solvers/{key}"'
                    f" ({name} requires a smoother)",
                    keyword="smoother"))
    return out


# ---------------------------------------------------------------- controlDict

def _check_control(case: CaseTree) -> list[Violation]:
    path = "system/controlDict"
    cd = case.foam(path)
    if cd is None:
        return []
    out = []
    for key in ("application", "startTime", "endTime", "deltaT"):
        if key not in cd.body:
            out.append(Violation("R4", path, f'keyword {key} is undefined in dictionary "{path}"',
                                 keyword=key))
    start, end = cd.body.get("startTime"), cd.body.get("endTime")
    if isinstance(start, Number) and isinstance(end, Number) and not end.value > start.value:
        out.append(Violation("R4", path, f"endTime {end} must be greater than startTime {start}",
                             keyword="endTime"))
    dt = cd.body.get("deltaT")
    if isinstance(dt, Number) and dt.value <= 0:
        out.append(Violation("R4", path, f"deltaT {dt} must be positive", keyword="deltaT"))
    return out


# ---------------------------------------------------------------- turbulence

def turbulence_files(case: CaseTree) -> Iterator[tuple[str, str]]:
    """(path, field suffix) for each turbulence/momentumTransport dictionary."""
    for path in case:
        for base in ("constant/turbulenceProperties", "constant/momentumTransport"):
            if path == base:
                yield path, ""
            elif path.startswith(base + "."):
                yield path, path[len(base):]


def turbulence_model(case: CaseTree) -> tuple[Optional[str], Optional[str]]:
    """(simulationType, model name) of the primary turbulence dictionary."""
    for path, _ in turbulence_files(case):
        foam = case.foam(path)
        if foam is None:
            continue
        sim = word(foam.body.get("simulationType"))
        sub = foam.body.get(sim) if sim else None
        model = None
        if isinstance(sub, Dict):
            model = word(sub.get(f"{sim}Model")) or word(sub.get("model"))
        return sim, model
    return None, None


def _check_turbulence(case: CaseTree, reqs: RequirementSet) -> list[Violation]:
    out = []
    for path, suffix in turbulence_files(case):
        foam = case.foam(path)
        if foam is None:
            continue
        sim = word(foam.body.get("simulationType"))
        if sim not in TURBULENCE_MODELS:
            out.append(Violation(
                "R5", path, f"Unknown simulationType {sim!r}; valid: laminar, RAS, LES",
                keyword="simulationType"))
            continue
        sub = foam.body.get(sim)
        model = None
        if isinstance(sub, Dict):
            model = word(sub.get(f"{sim}Model")) or word(sub.get("model"))
        if model is None:
            if sim != "laminar":
                out.append(Violation(
                    "R5", path, f'keyword {sim}Model is undefined in dictionary "{path}/{sim}"',
                    keyword=f"{sim}Model"))
            continue
        if model not in TURBULENCE_MODELS[sim]:
            out.append(Violation(
                "R5", path, f"Unknown {sim}Model type {model} for simulationType {sim}",
                keyword=model))
            continue
        if reqs.turbulence:
            for fld in MODEL_FIELDS.get(model, ()):
                fpath = f"0/{fld}{suffix}"
                if fpath not in case:
                    out.append(Violation(
                        "R5", fpath, f'cannot find file "{fpath}" required by {sim} model {model}',
                        keyword=f"{fld}{suffix}"))
    return out


# ---------------------------------------------------------------- warnings

def _check_headers(case: CaseTree) -> list[Violation]:
    out = []
    for path, entry in case.entries.items():
        foam = case.foam(path)
        if foam is None:
            continue
        obj = foam.object_name
        base = path.rsplit("/", 1)[-1]
        if obj is not None and obj != base and not base.endswith(".orig"):
            out.append(Violation("W1", path, f"header object {obj!r} differs from file name {base!r}",
                                 WARNING))
    return out


def _check_application(case: CaseTree, reqs: RequirementSet) -> list[Violation]:
    cd = case.foam("system/controlDict")
    app = word(cd.body.get("application")) if cd is not None else None
    if app and app != reqs.solver:
        return [Violation("W2", "system/controlDict",
                          f"application {app} differs from validated solver {reqs.solver}", WARNING)]
    return []


def validate_case(case: CaseTree, reqs: RequirementSet) -> list[Violation]:
    """Run every rule; Fatal violations come first, each group in rule order."""
    found: list[Violation] = []
    for path, message in case.warnings.items():
        found.append(Violation("R0", path, message, keyword=path.rsplit("/", 1)[-1]))
    found += _check_patches(case)
    found += _check_files(case, reqs)
    found += _check_keywords(case, reqs)
    found += _check_control(case)
    found += _check_turbulence(case, reqs)
    found += _check_headers(case)
    found += _check_application(case, reqs)
    return sorted(found, key=lambda v: v.severity != FATAL)


def fatal(violations: list[Violation]) -> list[Violation]:
    return [v for v in violations if v.severity == FATAL]
