"""Case directories: loading, writing, validation and task checks."""

from .requirements import (
    CONSTRAINT_TYPES,
    KNOWN_SOLVERS,
    MODEL_FIELDS,
    TURBULENCE_MODELS,
    RequirementSet,
    required_artifacts,
)
from .rules import FATAL, RULES, WARNING, Violation, fatal, mesh_patches, validate_case
from .tasks import (
    AnyOf,
    Assertion,
    CheckResult,
    FailedAssertion,
    IterationLimits,
    TaskSpec,
    UncheckableTask,
    assertion_from_json,
    check_task,
)
from .tree import Blob, CaseTree, ParsedFile, cases_equal, load_case, normalize_path, write_case

__all__ = [
    "AnyOf",
    "Assertion",
    "Blob",
    "CONSTRAINT_TYPES",
    "CaseTree",
    "CheckResult",
    "FATAL",
    "FailedAssertion",
    "IterationLimits",
    "KNOWN_SOLVERS",
    "MODEL_FIELDS",
    "ParsedFile",
    "RULES",
    "RequirementSet",
    "TURBULENCE_MODELS",
    "TaskSpec",
    "UncheckableTask",
    "Violation",
    "WARNING",
    "assertion_from_json",
    "cases_equal",
    "check_task",
    "fatal",
    "load_case",
    "mesh_patches",
    "normalize_path",
    "required_artifacts",
    "validate_case",
    "write_case",
]
