"""OpenFOAM dictionary parsing, serialization and path access."""

from .access import NotADict, NotFound, get_entry, lookup, set_entry, set_in
from .ast import (
    Atom,
    DimensionSet,
    Dict,
    FoamFile,
    FoamValue,
    List,
    Number,
    Raw,
    Seq,
    Vector,
    make_header,
)
from .parser import (
    FoamParseError,
    MissingHeader,
    NonAsciiFormat,
    UnbalancedBraces,
    parse_foam_file,
    parse_value,
)
from .serializer import FormatStyle, format_value, serialize_foam_file

__all__ = [
    "Atom",
    "DimensionSet",
    "Dict",
    "FoamFile",
    "FoamParseError",
    "FoamValue",
    "FormatStyle",
    "List",
    "MissingHeader",
    "NonAsciiFormat",
    "NotADict",
    "NotFound",
    "Number",
    "Raw",
    "Seq",
    "UnbalancedBraces",
    "Vector",
    "format_value",
    "get_entry",
    "lookup",
    "make_header",
    "parse_foam_file",
    "parse_value",
    "serialize_foam_file",
    "set_entry",
    "set_in",
]
