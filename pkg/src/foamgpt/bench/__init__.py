"""Benchmark suites, trial runs, result persistence and report tables."""

from .oracle import oracle_script, write_oracle_scripts
from .records import ResultsLog, load_records, persist_records, record_line
from .report import COLUMNS, format_cost, format_tokens, render_table
from .run import BenchConfig, bench_order, run_suite
from .suite import MissingFixture, SchemaError, Suite, bundled_suite_path, load_suite

__all__ = [
    "BenchConfig",
    "COLUMNS",
    "MissingFixture",
    "ResultsLog",
    "SchemaError",
    "Suite",
    "bench_order",
    "bundled_suite_path",
    "format_cost",
    "format_tokens",
    "load_records",
    "load_suite",
    "oracle_script",
    "persist_records",
    "record_line",
    "render_table",
    "run_suite",
    "write_oracle_scripts",
]
