"""Recursive-descent parser for the OpenFOAM ASCII dictionary format."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .ast import Atom, DimensionSet, Dict, FoamFile, FoamValue, List, Number, Raw, Seq, Vector


class FoamParseError(ValueError):
    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(f"{message} (line {line})" if line else message)
        self.line = line


class UnbalancedBraces(FoamParseError):
    pass


class MissingHeader(FoamParseError):
    pass


class NonAsciiFormat(FoamParseError):
    pass


_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")
_DELIMS = frozenset(" \t\r\n\f\v{}()[];\"")
_PUNCT = {"{": "LBRACE", "}": "RBRACE", "(": "LPAREN", ")": "RPAREN",
          "[": "LBRACK", "]": "RBRACK", ";": "SEMI"}


@dataclass(frozen=True)
class Token:
    kind: str  # WORD NUMBER STRING CODE LBRACE RBRACE LPAREN RPAREN LBRACK RBRACK SEMI EOF
    text: str
    start: int
    end: int
    line: int


def _paren_suffix_end(text: str, pos: int) -> int:
    """End offset of a balanced, whitespace-free ``(...)`` run starting at pos, or -1."""
    depth = 0
    for end in range(pos, len(text)):
        ch = text[end]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return end + 1
        elif ch in " \t\r\n\f\v;{}\"":
            return -1
    return -1


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, n = 0, len(text)
    line, counted = 1, 0

    def lineno(p: int) -> int:
        nonlocal line, counted
        line += text.count("\n", counted, p)
        counted = p
        return line

    while pos < n:
        c = text[pos]
        if c in " \t\r\n\f\v":
            pos += 1
            continue
        if text.startswith("//", pos):
            nl = text.find("\n", pos)
            pos = n if nl < 0 else nl + 1
            continue
        if text.startswith("/*", pos):
            close = text.find("*/", pos + 2)
            if close < 0:
                raise FoamParseError("unterminated block comment", lineno(pos))
            pos = close + 2
            continue
        ln = lineno(pos)
        if text.startswith("#{", pos):
            close = text.find("#}", pos + 2)
            if close < 0:
                raise FoamParseError("unterminated #{ code block", ln)
            tokens.append(Token("CODE", text[pos:close + 2], pos, close + 2, ln))
            pos = close + 2
            continue
        if c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, pos, pos + 1, ln))
            pos += 1
            continue
        if c == '"':
            end = pos + 1
            while end < n and text[end] != '"':
                end += 2 if text[end] == "\\" else 1
            if end >= n:
                raise FoamParseError("unterminated string", ln)
            tokens.append(Token("STRING", text[pos:end + 1], pos, end + 1, ln))
            pos = end + 1
            continue
        end = pos
        while end < n:
            ch = text[end]
            if ch == "(" and end > pos and (text[pos].isalpha() or text[pos] == "_"):
                # keywords such as div(phi,U) carry their own parentheses
                close = _paren_suffix_end(text, end)
                if close > 0:
                    end = close
                    continue
            if ch in _DELIMS or text.startswith("//", end) or text.startswith("/*", end):
                break
            end += 1
        word = text[pos:end]
        kind = "NUMBER" if _NUMBER.match(word) else "WORD"
        tokens.append(Token(kind, word, pos, end, ln))
        pos = end
    tokens.append(Token("EOF", "", n, n, lineno(n)))
    return tokens


def check_braces(tokens: list[Token]) -> None:
    stack: list[Token] = []
    pairs = {"RBRACE": "LBRACE", "RPAREN": "LPAREN", "RBRACK": "LBRACK"}
    for tok in tokens:
        if tok.kind in ("LBRACE", "LPAREN", "LBRACK"):
            stack.append(tok)
        elif tok.kind in pairs:
            if not stack or stack[-1].kind != pairs[tok.kind]:
                raise UnbalancedBraces(f"unexpected {tok.text!r}", tok.line)
            stack.pop()
    if stack:
        raise UnbalancedBraces(f"unclosed {stack[-1].text!r}", stack[-1].line)


class _Parser:
    def __init__(self, text: str, tokens: list[Token]) -> None:
        self.text = text
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str) -> FoamParseError:
        return FoamParseError(f"{msg}, got {self.tok.text or 'end of file'!r}", self.tok.line)

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            raise self.fail(f"expected {kind}")
        return self.advance()

    def parse_entries(self, top_level: bool) -> Dict:
        entries: list = []
        while self.tok.kind not in ("EOF", "RBRACE"):
            mark = self.i
            try:
                entries.append(self.parse_entry())
            except FoamParseError:
                if not top_level:
                    raise
                # keep everything from the failing entry onwards verbatim
                start = self.toks[mark].start
                end = self.toks[-2].end
                entries.append((None, Raw(self.text[start:end])))
                self.i = len(self.toks) - 1
        return Dict(tuple(entries))

    def parse_entry(self):
        tok = self.tok
        if tok.kind == "WORD" and tok.text.startswith("#"):
            return None, self.parse_directive()
        if tok.kind == "WORD" and tok.text.startswith("$") and self.peek().kind == "SEMI":
            self.advance()
            semi = self.advance()
            return None, Raw(self.text[tok.start:semi.end])
        if tok.kind in ("WORD", "STRING"):
            key = self.advance().text
            if self.tok.kind == "LBRACE":
                self.advance()
                body = self.parse_entries(top_level=False)
                self.expect("RBRACE")
                return key, body
            return key, self.parse_values(("SEMI",), consume_end=True)
        if tok.kind in ("NUMBER", "LPAREN"):
            return None, self.parse_standalone()
        raise self.fail("expected keyword")

    def parse_standalone(self) -> FoamValue:
        """Keyword-less data such as the ``N ( ... )`` list of a boundary file.

        Ends after the first list, with an optional ``;``.
        """
        items: list = []
        while True:
            if self.tok.kind not in ("NUMBER", "LPAREN"):
                raise self.fail("expected list")
            item = self.parse_item()
            items.append(item)
            if isinstance(item, (List, Vector)):
                break
        if self.tok.kind == "SEMI":
            self.advance()
        return items[0] if len(items) == 1 else Seq(tuple(items))

    def parse_directive(self) -> Raw:
        start = self.tok.start
        eol = self.text.find("\n", start)
        eol = len(self.text) if eol < 0 else eol
        line = self.text[start:eol]
        cut = line.find("//")
        if cut >= 0:
            line = line[:cut]
        stop = start + len(line.rstrip())
        if self.tok.text in ("#codeStream", "#calc") or "{" in line:
            raise self.fail("directive with body is not supported at entry level")
        while self.tok.kind != "EOF" and self.tok.start < stop:
            self.advance()
        return Raw(self.text[start:stop])

    def parse_values(self, terminators: tuple, consume_end: bool) -> FoamValue:
        items: list = []
        while self.tok.kind not in terminators:
            if self.tok.kind in ("EOF", "RBRACE", "RPAREN", "RBRACK"):
                raise self.fail("expected ';'")
            items.append(self.parse_item())
        if consume_end:
            self.advance()
        if len(items) == 1:
            return items[0]
        return Seq(tuple(items))

    def parse_item(self) -> FoamValue:
        tok = self.tok
        if tok.kind == "NUMBER":
            self.advance()
            nxt = self.tok
            if nxt.kind == "LPAREN" and nxt.start == tok.end and tok.text.isdigit():
                return self.parse_list(size_prefixed=True)
            return Number(tok.text)
        if tok.kind == "WORD":
            self.advance()
            if tok.text.startswith(("$", "#")):
                return Raw(tok.text)
            return Atom(tok.text)
        if tok.kind == "STRING":
            self.advance()
            return Atom(tok.text)
        if tok.kind == "CODE":
            self.advance()
            return Raw(tok.text)
        if tok.kind == "LPAREN":
            return self.parse_list(size_prefixed=False)
        if tok.kind == "LBRACK":
            return self.parse_brackets()
        if tok.kind == "LBRACE":
            self.advance()
            body = self.parse_entries(top_level=False)
            self.expect("RBRACE")
            return body
        raise self.fail("expected value")

    def parse_list(self, size_prefixed: bool) -> FoamValue:
        self.expect("LPAREN")
        items: list = []
        while self.tok.kind != "RPAREN":
            if self.tok.kind in ("EOF", "SEMI", "RBRACE", "RBRACK"):
                raise self.fail("expected ')'")
            items.append(self.parse_item())
        self.advance()
        if items and not size_prefixed and all(isinstance(x, Number) for x in items):
            return Vector(tuple(items))
        return List(tuple(items), size_prefixed=size_prefixed)

    def parse_brackets(self) -> FoamValue:
        open_tok = self.expect("LBRACK")
        items: list = []
        while self.tok.kind != "RBRACK":
            if self.tok.kind == "EOF":
                raise self.fail("expected ']'")
            items.append(self.advance())
        close = self.advance()
        if len(items) == 7 and all(t.kind == "NUMBER" for t in items):
            return DimensionSet(tuple(Number(t.text) for t in items))
        return Raw(self.text[open_tok.start:close.end])


def parse_foam_file(text: str, source_path: Optional[str] = None) -> FoamFile:
    """Parse one dictionary file.

    Comments are dropped. Unparseable top-level tails become a trailing Raw
    entry; only unbalanced brackets, a missing ``FoamFile`` header and binary
    format raise.
    """
    tokens = tokenize(text)
    check_braces(tokens)
    p = _Parser(text, tokens)
    if not (p.tok.kind == "WORD" and p.tok.text == "FoamFile" and p.peek().kind == "LBRACE"):
        raise MissingHeader("no 'FoamFile { ... }' header block", p.tok.line)
    p.advance()
    p.advance()
    header = p.parse_entries(top_level=False)
    p.expect("RBRACE")
    fmt = header.get("format")
    if not (isinstance(fmt, Atom) and fmt.text == "ascii"):
        raise NonAsciiFormat(f"format must be ascii, got {getattr(fmt, 'text', fmt)!r}")
    body = p.parse_entries(top_level=True)
    if p.tok.kind != "EOF":
        raise UnbalancedBraces("unexpected '}'", p.tok.line)
    return FoamFile(header=header, body=body, source_path=source_path)


def parse_value(text: str) -> FoamValue:
    """Parse a standalone value expression such as ``uniform (2 0 0)``."""
    tokens = tokenize(text)
    check_braces(tokens)
    p = _Parser(text, tokens)
    value = p.parse_values(("EOF",), consume_end=False)
    return value
