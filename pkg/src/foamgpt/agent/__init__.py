"""Plan, generate, validate, run and repair OpenFOAM cases with a chat model."""

from ..case import IterationLimits, TaskSpec
from .interpret import NoFilesFound, interpret_files
from .loop import NullRetriever, Retriever, Transcript, read_transcript, run_agent, starting_case
from .plan import NoPlanPossible, build_plan, fallback_plan, parse_plan
from .prompts import load_prompt
from .retry import BudgetImpossible, budget_tokens, compose_request, compose_retry, implicated_file
from .runners import (
    MockRunner,
    RealRunner,
    RunnerUnavailable,
    execute_commands,
    extract_error,
)
from .types import CommandSpec, ErrorReport, ExecutionPlan, RunOutcome, TrialRecord

__all__ = [
    "BudgetImpossible",
    "CommandSpec",
    "ErrorReport",
    "ExecutionPlan",
    "IterationLimits",
    "MockRunner",
    "NoFilesFound",
    "NoPlanPossible",
    "NullRetriever",
    "RealRunner",
    "Retriever",
    "RunOutcome",
    "RunnerUnavailable",
    "TaskSpec",
    "TrialRecord",
    "Transcript",
    "budget_tokens",
    "build_plan",
    "compose_request",
    "compose_retry",
    "execute_commands",
    "extract_error",
    "fallback_plan",
    "implicated_file",
    "interpret_files",
    "load_prompt",
    "parse_plan",
    "read_transcript",
    "run_agent",
    "starting_case",
]
