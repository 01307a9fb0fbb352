"""Tokenizer for PENCIL source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import LexError, Loc

KEYWORDS = frozenset("""
    int float double void char short long unsigned signed
    for while do if else return goto break continue switch case default
    const restrict static struct union enum typedef sizeof extern inline
    volatile register auto
""".split())

KEYWORD = "keyword"
IDENT = "identifier"
INT = "integer-literal"
FLOAT = "float-literal"
PUNCT = "punctuator"
PRAGMA = "pragma-line"
HASH = "hash-line"  # any other preprocessor line; the parser rejects it
STRING = "string-literal"
EOF = "eof"

_PUNCTUATORS = sorted("""
    <<= >>= ... -> ++ -- << >> <= >= == != && || += -= *= /= %= &= |= ^=
    [ ] ( ) { } . , ; : ? ~ ! + - * / % < > = & | ^
""".split(), key=len, reverse=True)

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*)
  | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?)
  | (?P<int>0[xX][0-9a-fA-F]+[uUlL]*|\d+[uUlL]*)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>""" + "|".join(re.escape(p) for p in _PUNCTUATORS) + r""")
""", re.VERBOSE)


_HASH_RE = re.compile(r"[ \t]*#")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    loc: Loc

    def is_(self, text):
        return self.kind in (PUNCT, KEYWORD) and self.text == text

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.loc.line}:{self.loc.column})"


def _read_hash_line(source, pos):
    """Return (text, end) of a preprocessor line, honouring backslash joins."""
    parts = []
    while True:
        end = source.find("\n", pos)
        if end < 0:
            end = len(source)
        chunk = source[pos:end]
        if chunk.endswith("\\"):
            parts.append(chunk[:-1])
            pos = end + 1
            if pos > len(source):
                return " ".join(parts), end
            continue
        parts.append(chunk)
        return " ".join(p.strip() for p in parts).strip(), end


def tokenize(source, filename="<input>"):
    """Split ``source`` into tokens; comments vanish, pencil pragmas stay whole."""
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    at_line_start = True
    n = len(source)
    while pos < n:
        col = pos - line_start + 1
        if at_line_start:
            m = _HASH_RE.match(source, pos)
            if m:
                start = m.end() - 1
                text, end = _read_hash_line(source, start)
                # Strip a trailing comment from the directive text.
                text = re.sub(r"\s*(//.*|/\*.*?\*/\s*)$", "", text)
                loc = Loc(filename, line, start - line_start + 1)
                is_pencil = re.match(r"#\s*pragma\s+pencil\b", text)
                tokens.append(Token(PRAGMA if is_pencil else HASH, text, loc))
                line += source.count("\n", pos, end)
                pos = end
                continue
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LexError(f"illegal character {source[pos]!r}", Loc(filename, line, col))
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
            at_line_start = True
            pos = m.end()
            continue
        if kind == "block_comment":
            end = source.find("*/", m.end())
            if end < 0:
                raise LexError("unterminated comment", Loc(filename, line, col))
            newlines = source.count("\n", pos, end)
            if newlines:
                line += newlines
                line_start = source.rfind("\n", pos, end) + 1
            pos = end + 2
            continue
        pos = m.end()
        if kind in ("ws", "line_comment"):
            continue
        at_line_start = False
        loc = Loc(filename, line, col)
        if kind == "ident":
            tokens.append(Token(KEYWORD if text in KEYWORDS else IDENT, text, loc))
        elif kind == "int":
            tokens.append(Token(INT, text, loc))
        elif kind == "float":
            tokens.append(Token(FLOAT, text, loc))
        elif kind == "string":
            tokens.append(Token(STRING, text, loc))
        else:
            tokens.append(Token(PUNCT, text, loc))
    return tokens
