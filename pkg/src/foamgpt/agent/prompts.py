"""Prompt assets and request builders."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Optional, Union

FORMAT_REMINDER = (
    "Your previous reply contained no usable files. Reply again using only "
    "'FILE: <path>' header lines, each followed by a fenced code block with the full file."
)

RETRY_INSTRUCTION = (
    "Fix the cause of this error. Reply with the complete corrected content of every file "
    "you change, each as a FILE: block."
)

GENERATE_INSTRUCTION = (
    "Write the case files. Reply with every file as a FILE: block."
)


def load_prompt(name: str, override: Optional[Union[str, Path]] = None) -> str:
    """Bundled prompt ``name`` (system or plan), or the text of ``override``.

    Lines starting with ``#`` at the top of the file are version comments.
    """
    if override is not None:
        text = Path(override).read_text("utf-8")
    else:
        text = resources.files("foamgpt").joinpath(f"data/prompts/{name}.txt").read_text("utf-8")
    lines = text.splitlines()
    while lines and lines[0].startswith("#"):
        lines.pop(0)
    return "\n".join(lines).strip() + "\n"
