"""Emit FoamFile ASTs in the standard OpenFOAM layout."""

from __future__ import annotations

from dataclasses import dataclass

from .ast import Atom, DimensionSet, Dict, FoamFile, FoamValue, List, Number, Raw, Seq, Vector

BANNER = """\
/*--------------------------------*- C++ -*----------------------------------*\\
  =========                 |
  \\\\      /  F ield         | OpenFOAM: The Open Source CFD Toolbox
   \\\\    /   O peration     | Version:  v2406
    \\\\  /    A nd           | Website:  www.openfoam.com
     \\\\/     M anipulation  |
\\*---------------------------------------------------------------------------*/
"""

RULE = "// " + "* " * 37 + "//"


@dataclass(frozen=True)
class FormatStyle:
    banner: bool = True
    indent: int = 4
    inline_list_max: int = 12
    # keywords are padded to this column, as OpenFOAM's own writer does
    key_width: int = 16


def _is_flat(v: FoamValue) -> bool:
    return isinstance(v, (Atom, Number, DimensionSet, Vector, Raw)) and not (
        isinstance(v, Raw) and "\n" in v.text
    )


def format_value(v: FoamValue, style: FormatStyle = FormatStyle(), level: int = 0) -> str:
    """Render a value. Multi-line output is indented relative to ``level``."""
    pad = " " * (style.indent * level)
    if isinstance(v, (Atom, Number)):
        return str(v)
    if isinstance(v, Raw):
        return v.text
    if isinstance(v, DimensionSet):
        return "[" + " ".join(str(x) for x in v.exponents) + "]"
    if isinstance(v, Vector):
        return "(" + " ".join(str(x) for x in v.components) + ")"
    if isinstance(v, Seq):
        return " ".join(format_value(x, style, level) for x in v.items)
    if isinstance(v, List):
        prefix = str(len(v.items)) if v.size_prefixed else ""
        if all(_is_flat(x) for x in v.items) and len(v.items) <= style.inline_list_max:
            return prefix + "(" + " ".join(format_value(x, style, level) for x in v.items) + ")"
        inner = " " * (style.indent * (level + 1))
        lines = [prefix + "("]
        for item in v.items:
            if isinstance(item, Dict):
                lines.append(format_dict_block(item, style, level + 1))
            else:
                lines.append(inner + format_value(item, style, level + 1))
        lines.append(pad + ")")
        return "\n".join(lines)
    if isinstance(v, Dict):
        return "\n" + format_dict_block(v, style, level)
    raise TypeError(f"not a FoamValue: {v!r}")


def format_dict_block(d: Dict, style: FormatStyle, level: int) -> str:
    pad = " " * (style.indent * level)
    body = format_entries(d, style, level + 1)
    return f"{pad}{{\n{body}{pad}}}" if body else f"{pad}{{\n{pad}}}"


def _format_entry(key, value: FoamValue, style: FormatStyle, level: int) -> str:
    pad = " " * (style.indent * level)
    if key is None:
        if isinstance(value, Raw):
            return pad + value.text + "\n"
        items = value.items if isinstance(value, Seq) else (value,)
        return "".join(pad + format_value(x, style, level) + "\n" for x in items)
    if isinstance(value, Dict):
        return f"{pad}{key}\n{format_dict_block(value, style, level)}\n"
    if isinstance(value, Seq) and not value.items:
        return f"{pad}{key};\n"
    text = format_value(value, style, level)
    if "\n" in text and isinstance(value, List):
        return f"{pad}{key}\n{pad}{text};\n"
    return f"{pad}{key:<{style.key_width - 1}} {text};\n"


def format_entries(d: Dict, style: FormatStyle, level: int) -> str:
    return "".join(_format_entry(k, v, style, level) for k, v in d.entries)


def serialize_foam_file(f: FoamFile, style: FormatStyle = FormatStyle()) -> str:
    parts = []
    if style.banner:
        parts.append(BANNER)
    parts.append("FoamFile\n" + format_dict_block(f.header, style, 0) + "\n")
    parts.append(RULE + "\n\n")
    body = format_entries(f.body, style, 0)
    parts.append(body)
    parts.append("\n" + RULE + "\n")
    return "".join(parts)
