"""Pricing table loading and exact micro-USD cost arithmetic."""

from __future__ import annotations

import json
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .types import Pricing, UsageTotals

MICRO = 1_000_000
# context for models we have no row for; large enough not to block local models
UNPRICED_CONTEXT = 128 * 1024


def usd_to_micro(value: Union[str, int, Decimal]) -> int:
    micro = Decimal(str(value)) * MICRO
    if micro != micro.to_integral_value():
        raise ValueError(f"price {value} is finer than one micro-USD")
    return int(micro)


def parse_context(value: Union[str, int]) -> int:
    """``32k`` -> 32768; plain integers pass through."""
    if isinstance(value, int):
        return value
    text = str(value).strip().lower()
    if text.endswith("k"):
        return int(text[:-1]) * 1024
    return int(text)


def pricing_from_json(obj: dict) -> Pricing:
    return Pricing(
        model=obj["model"],
        input_per_million=usd_to_micro(obj["input_usd_per_million"]),
        output_per_million=usd_to_micro(obj["output_usd_per_million"]),
        context_length=parse_context(obj["context_length"]),
        aliases=tuple(obj.get("aliases", ())),
    )


def load_pricing(path: Optional[Union[str, Path]] = None) -> list[Pricing]:
    if path is None:
        text = resources.files("foamgpt").joinpath("data/pricing.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return [pricing_from_json(row) for row in json.loads(text)]


def default_pricing() -> list[Pricing]:
    return load_pricing()


def find_pricing(model: str, table: Iterable[Pricing]) -> Optional[Pricing]:
    for row in table:
        if row.matches(model):
            return row
    return None


def pricing_for(model: str, table: Sequence[Pricing]) -> Pricing:
    """The matching row, or a zero-price row flagged ``unpriced``."""
    row = find_pricing(model, table)
    if row is not None:
        return row
    return Pricing(model=model, input_per_million=0, output_per_million=0,
                   context_length=UNPRICED_CONTEXT, unpriced=True)


def _term(tokens: int, per_million: int) -> int:
    # round half up; both operands are non-negative integers
    return (tokens * per_million + MICRO // 2) // MICRO


def compute_cost(usage: UsageTotals, pricing: Pricing) -> int:
    """Cost in integer micro-USD."""
    return _term(usage.input_tokens, pricing.input_per_million) + _term(
        usage.output_tokens, pricing.output_per_million)


def format_usd(micro: int, places: int = 6) -> str:
    """``75000000`` -> ``$75.000000``; zero renders as ``$0``."""
    if micro == 0:
        return "$0"
    value = (Decimal(micro) / MICRO).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)
    return f"${value}"
