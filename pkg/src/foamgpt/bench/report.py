"""Result tables in the generation-results layout."""

from __future__ import annotations

import csv
import io
import math
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

from ..agent.types import TrialRecord

COLUMNS = ("case", "file provided", "iterations", "result", "total token", "token cost")
CHECK = "✓"
MAX_RESULT = 80


def format_tokens(n: int) -> str:
    """71000 -> 71k; counts under 1000 stay plain."""
    if n < 1000:
        return str(n)
    k = (Decimal(n) / 1000).quantize(Decimal(1), rounding=ROUND_HALF_UP)
    return f"{k}k"


def format_cost(micro: int) -> str:
    """Dollars with at least two decimals and two significant figures."""
    if micro <= 0:
        return "$0.00"
    value = Decimal(micro) / 1_000_000
    places = max(2, 1 - math.floor(math.log10(value)))
    places = min(places, 6)
    text = str(value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))
    whole, _, frac = text.partition(".")
    frac = frac.rstrip("0").ljust(2, "0")
    return f"${whole}.{frac}"


def result_cell(record: TrialRecord) -> str:
    if record.outcome == "success":
        return CHECK
    if record.final_error is not None:
        text = record.final_error.head()
    elif record.warnings:
        text = record.warnings[-1]
    else:
        text = record.outcome
    text = " ".join(text.split())
    return text if len(text) <= MAX_RESULT else text[:MAX_RESULT - 3] + "..."


def table_rows(records: Sequence[TrialRecord]) -> list[tuple[str, ...]]:
    ordered = sorted(records, key=lambda r: (r.suite_index, r.backend, r.task_id))
    several = len({r.backend for r in records}) > 1
    rows = []
    for r in ordered:
        case = r.case_label or r.task_id
        if several:
            case = f"{case} ({r.backend})"
        rows.append((case, r.files_provided or "none", str(r.iterations_used), result_cell(r),
                     format_tokens(r.usage.total), format_cost(r.cost)))
    return rows


def render_table(records: Sequence[TrialRecord], fmt: str = "markdown") -> str:
    rows = table_rows(records)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt != "markdown":
        raise ValueError(f"unknown table format {fmt!r}")
    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "|".join("---" for _ in COLUMNS) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(c.replace("|", "\\|") for c in row) + " |")
    return "\n".join(lines) + "\n"
