"""Per-solver file and keyword requirements, and the turbulence model registry."""

from __future__ import annotations

from dataclasses import dataclass, field

SYSTEM_FILES = ("system/controlDict", "system/fvSchemes", "system/fvSolution")


@dataclass(frozen=True)
class RequirementSet:
    solver: str
    required_files: frozenset[str]
    # (file, keyword path) pairs that must resolve
    required_keywords: tuple[tuple[str, str], ...] = ()
    # solver reads turbulenceProperties, so model-specific fields are required
    turbulence: bool = False
    heuristic: bool = False


@dataclass(frozen=True)
class _Entry:
    files: tuple[str, ...]
    algorithm: str
    turbulence: bool = True
    extra_keywords: tuple[tuple[str, str], ...] = field(default=())


# Phase-named paths (alpha.water, U.air) are resolved against the case's
# transportProperties by the validator; see phase_substitutions().
_REGISTRY: dict[str, _Entry] = {
    "icoFoam": _Entry(("0/U", "0/p", "constant/transportProperties"), "PISO", turbulence=False),
    "pisoFoam": _Entry(("0/U", "0/p", "constant/transportProperties",
                        "constant/turbulenceProperties"), "PISO"),
    "simpleFoam": _Entry(("0/U", "0/p", "constant/transportProperties",
                          "constant/turbulenceProperties"), "SIMPLE"),
    "pimpleFoam": _Entry(("0/U", "0/p", "constant/transportProperties",
                          "constant/turbulenceProperties"), "PIMPLE"),
    "buoyantBoussinesqSimpleFoam": _Entry(
        ("0/U", "0/p", "0/p_rgh", "0/T", "0/alphat", "constant/g",
         "constant/transportProperties", "constant/turbulenceProperties"), "SIMPLE",
        extra_keywords=(("constant/transportProperties", "beta"),
                        ("constant/transportProperties", "TRef"),
                        ("constant/transportProperties", "Pr"),
                        ("constant/transportProperties", "Prt"))),
    "buoyantBoussinesqPimpleFoam": _Entry(
        ("0/U", "0/p", "0/p_rgh", "0/T", "0/alphat", "constant/g",
         "constant/transportProperties", "constant/turbulenceProperties"), "PIMPLE"),
    "interFoam": _Entry(
        ("0/U", "0/p_rgh", "0/alpha.water", "constant/g", "constant/transportProperties",
         "constant/turbulenceProperties", "system/setFieldsDict"), "PIMPLE",
        extra_keywords=(("constant/transportProperties", "phases"),
                        ("constant/transportProperties", "sigma"))),
    "MPPICFoam": _Entry(
        ("0/U.air", "0/p", "constant/g", "constant/transportProperties",
         "constant/kinematicCloudProperties"), "PIMPLE",
        extra_keywords=(("constant/transportProperties", "continuousPhase"),)),
}

KNOWN_SOLVERS = tuple(_REGISTRY)


def required_artifacts(solver_name: str) -> RequirementSet:
    entry = _REGISTRY.get(solver_name)
    if entry is None:
        return RequirementSet(
            solver=solver_name,
            required_files=frozenset(SYSTEM_FILES + ("0/U", "0/p")),
            heuristic=True,
        )
    keywords = (
        ("system/controlDict", "application"),
        ("system/fvSolution", "solvers"),
        ("system/fvSolution", entry.algorithm),
    ) + entry.extra_keywords
    return RequirementSet(
        solver=solver_name,
        required_files=frozenset(SYSTEM_FILES + entry.files),
        required_keywords=keywords,
        turbulence=entry.turbulence,
    )


# Registry of accepted model names per simulationType. Seeded with the models
# the benchmark tasks switch between plus common neighbours.
TURBULENCE_MODELS: dict[str, frozenset[str]] = {
    "laminar": frozenset({"Stokes", "generalisedNewtonian", "Maxwell", "Giesekus", "PTT"}),
    "RAS": frozenset({
        "kEpsilon", "RNGkEpsilon", "realizableKE", "LaunderSharmaKE", "kOmega", "kOmegaSST",
        "kOmegaSSTLM", "kkLOmega", "LRR", "SSG", "SpalartAllmaras", "v2f", "qZeta",
        "ShihQuadraticKE", "LienCubicKE",
    }),
    "LES": frozenset({
        "Smagorinsky", "WALE", "kEqn", "dynamicKEqn", "dynamicLagrangian", "DeardorffDiffStress",
        "SpalartAllmarasDES", "SpalartAllmarasDDES", "SpalartAllmarasIDDES", "kOmegaSSTDES",
    }),
}

# Field files each model reads from the start time directory.
MODEL_FIELDS: dict[str, tuple[str, ...]] = {
    "kEpsilon": ("k", "epsilon", "nut"),
    "RNGkEpsilon": ("k", "epsilon", "nut"),
    "realizableKE": ("k", "epsilon", "nut"),
    "LaunderSharmaKE": ("k", "epsilon", "nut"),
    "ShihQuadraticKE": ("k", "epsilon", "nut"),
    "LienCubicKE": ("k", "epsilon", "nut"),
    "kOmega": ("k", "omega", "nut"),
    "kOmegaSST": ("k", "omega", "nut"),
    "kOmegaSSTLM": ("k", "omega", "nut", "ReThetat", "gammaInt"),
    "kkLOmega": ("kl", "kt", "omega", "nut"),
    "LRR": ("R", "epsilon", "nut"),
    "SSG": ("R", "epsilon", "nut"),
    "SpalartAllmaras": ("nuTilda", "nut"),
    "v2f": ("k", "epsilon", "v2", "f", "nut"),
    "Smagorinsky": ("nut",),
    "WALE": ("nut",),
    "kEqn": ("k", "nut"),
    "dynamicKEqn": ("k", "nut"),
    "SpalartAllmarasDES": ("nuTilda", "nut"),
    "SpalartAllmarasDDES": ("nuTilda", "nut"),
    "SpalartAllmarasIDDES": ("nuTilda", "nut"),
    "kOmegaSSTDES": ("k", "omega", "nut"),
}

# Linear solvers that smooth and therefore need a 'smoother' entry.
SMOOTHED_SOLVERS = frozenset({"GAMG", "smoothSolver"})

CONSTRAINT_TYPES = frozenset({
    "empty", "symmetry", "symmetryPlane", "wedge", "cyclic", "cyclicAMI", "cyclicACMI",
    "cyclicSlip", "processor", "processorCyclic", "nonConformalCyclic",
})
