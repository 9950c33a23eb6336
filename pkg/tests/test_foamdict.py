from __future__ import annotations

from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foamgpt.foamdict import (
    Atom,
    DimensionSet,
    Dict,
    FoamFile,
    List,
    MissingHeader,
    NonAsciiFormat,
    NotADict,
    NotFound,
    Number,
    Raw,
    Seq,
    UnbalancedBraces,
    Vector,
    get_entry,
    lookup,
    make_header,
    parse_foam_file,
    parse_value,
    serialize_foam_file,
    set_entry,
    set_in,
)

from conftest import DATA

HEADER = "FoamFile\n{\n version 2.0;\n format ascii;\n class dictionary;\n object controlDict;\n}\n"


def parse(body: str) -> FoamFile:
    return parse_foam_file(HEADER + body)


def test_scalars_words_and_comments():
    f = parse("application icoFoam; // trailing\n/* block\ncomment */ endTime 0.5;\n")
    assert f.body["application"] == Atom("icoFoam")
    assert f.body["endTime"] == Number("0.5")
    assert f.object_name == "controlDict"
    assert f.class_name == "dictionary"


def test_compound_values():
    f = parse("sub { a (1 2 3); b [0 1 -1 0 0 0 0]; c uniform (0 0 0); }\nl 3(a b c);\n")
    sub = f.body["sub"]
    assert sub["a"] == Vector.of(1, 2, 3)
    assert isinstance(sub["b"], DimensionSet)
    assert sub["c"] == Seq((Atom("uniform"), Vector.of(0, 0, 0)))
    assert f.body["l"] == List((Atom("a"), Atom("b"), Atom("c")), size_prefixed=True)


def test_directives_and_macros_are_kept_verbatim():
    f = parse('#include "initialConditions"\nkey $sub;\n')
    assert f.body.entries[0] == (None, Raw('#include "initialConditions"'))
    assert f.body["key"] == Raw("$sub")
    text = serialize_foam_file(f)
    assert '#include "initialConditions"' in text
    assert "$sub;" in text


def test_number_keeps_lexeme():
    f = parse("a 1e-05; b 1.0; c 0.10;\n")
    text = serialize_foam_file(f)
    assert "1e-05;" in text and "1.0;" in text and "0.10;" in text
    assert f.body["a"].value == Decimal("0.00001")


def test_duplicate_keys_last_wins():
    f = parse("a 1; a 2;\n")
    assert f.body["a"] == Number("2")
    assert len(f.body) == 2


@pytest.mark.parametrize("text, exc", [
    ("", MissingHeader),
    ("application icoFoam;", MissingHeader),
    (HEADER.replace("ascii", "binary"), NonAsciiFormat),
    (HEADER + "a { b 1;", UnbalancedBraces),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_foam_file(text)


def test_parse_value():
    assert parse_value("uniform (1 2 3)") == Seq((Atom("uniform"), Vector.of(1, 2, 3)))
    assert parse_value("kOmegaSST") == Atom("kOmegaSST")


def test_lookup_and_set():
    f = parse("sub { a (1 2 3); }\napplication icoFoam;\n")
    assert lookup(f.body, "sub/a") == Vector.of(1, 2, 3)
    g = set_entry(f, "sub/a", Vector.of(4, 5, 6))
    assert get_entry(g, "sub/a") == Vector.of(4, 5, 6)
    assert get_entry(f, "sub/a") == Vector.of(1, 2, 3)  # immutable
    with pytest.raises(NotFound):
        lookup(f.body, "sub/missing")
    with pytest.raises(NotADict):
        lookup(f.body, "application/x")
    d = set_in(f.body, "new/deep/k", Atom("v"))
    assert lookup(d, "new/deep/k") == Atom("v")


def test_set_preserves_entry_order():
    f = parse("a 1; b 2; c 3;\n")
    g = set_entry(f, "b", Number("5"))
    assert [k for k, _ in g.body.entries] == ["a", "b", "c"]


def test_serializer_pads_keywords():
    f = FoamFile(make_header("dictionary", "controlDict", "system"),
                 Dict((("application", Atom("icoFoam")),)))
    assert "\napplication     icoFoam;\n" in serialize_foam_file(f)


def corpus():
    return [p for d in ("tutorials", "generation", "oracles")
            for p in sorted((DATA / d).rglob("*"))
            if p.is_file() and "FoamFile" in p.read_text("utf-8")]


@pytest.mark.parametrize("path", corpus(), ids=lambda p: str(p.relative_to(DATA)))
def test_bundled_dictionaries_round_trip(path):
    first = parse_foam_file(path.read_text("utf-8"))
    again = parse_foam_file(serialize_foam_file(first))
    assert again == first
    assert serialize_foam_file(again) == serialize_foam_file(first)


# -- property: generated ASTs survive serialize -> parse

_words = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,8}", fullmatch=True).filter(
    lambda w: w not in {"FoamFile"})
_numbers = st.one_of(
    st.integers(-10**6, 10**6).map(str),
    st.decimals(-1000, 1000, places=4, allow_nan=False, allow_infinity=False).map(str),
    st.sampled_from(["1e-05", "2.5e+3", "-0.0"]),
).map(Number)
_scalars = st.one_of(_words.map(Atom), _numbers)
_vectors = st.lists(_numbers, min_size=1, max_size=4).map(lambda xs: Vector(tuple(xs)))
_dims = st.lists(st.integers(-3, 3).map(lambda n: Number(str(n))), min_size=7, max_size=7).map(
    lambda xs: DimensionSet(tuple(xs)))
_leaf = st.one_of(_scalars, _vectors, _dims,
                  st.tuples(_words.map(Atom), _vectors).map(lambda t: Seq(t)))


def _dicts(children):
    return st.lists(st.tuples(_words, children), max_size=4, unique_by=lambda kv: kv[0]).map(
        lambda kvs: Dict(tuple(kvs)))


_values = st.recursive(_leaf, _dicts, max_leaves=12)


@settings(max_examples=150, deadline=None)
@given(_dicts(_values))
def test_generated_dicts_round_trip(body):
    f = FoamFile(make_header("dictionary", "test"), body)
    assert parse_foam_file(serialize_foam_file(f)).body == body
