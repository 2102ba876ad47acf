"""Hand-rolled scanner producing positioned tokens.

Comments (`//` and `/* */`) are skipped.  The first illegal character or an
unterminated block comment stops the scan with a single E010.
"""

from __future__ import annotations

import re

from .diagnostics import Diagnostic
from .tokens import FLOAT, IDENT, INT, KEYWORD, KEYWORDS, OP, OPERATORS, PUNCT, PUNCTUATION, Token

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
# Order matters: forms with a '.' or an exponent win over a bare int.
_FLOAT_RE = re.compile(r"(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+")
_INT_RE = re.compile(r"\d+")


class LexResult:
    """Token stream plus the diagnostic that stopped the scan, if any."""

    def __init__(self, tokens: list[Token], error: Diagnostic | None = None):
        self.tokens = tokens
        self.error = error

    @property
    def ok(self) -> bool:
        return self.error is None


def tokenize(source: str) -> LexResult:
    tokens: list[Token] = []
    pos = 0
    line = 1
    col = 1
    n = len(source)

    def advance(text: str) -> None:
        nonlocal pos, line, col
        for ch in text:
            pos += 1
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    while pos < n:
        ch = source[pos]

        if ch in " \t\r\n":
            advance(ch)
            continue

        if source.startswith("//", pos):
            end = source.find("\n", pos)
            advance(source[pos:] if end < 0 else source[pos:end])
            continue

        if source.startswith("/*", pos):
            end = source.find("*/", pos + 2)
            if end < 0:
                return LexResult(
                    tokens, Diagnostic("E010", "unterminated block comment", line, col)
                )
            advance(source[pos : end + 2])
            continue

        m = _IDENT_RE.match(source, pos)
        if m:
            text = m.group()
            kind = KEYWORD if text in KEYWORDS else IDENT
            tokens.append(Token(kind, text, line, col))
            advance(text)
            continue

        m = _FLOAT_RE.match(source, pos)
        if m:
            tokens.append(Token(FLOAT, m.group(), line, col))
            advance(m.group())
            continue

        m = _INT_RE.match(source, pos)
        if m:
            tokens.append(Token(INT, m.group(), line, col))
            advance(m.group())
            continue

        for op in OPERATORS:
            if source.startswith(op, pos):
                tokens.append(Token(OP, op, line, col))
                advance(op)
                break
        else:
            if ch in PUNCTUATION:
                tokens.append(Token(PUNCT, ch, line, col))
                advance(ch)
            else:
                return LexResult(
                    tokens, Diagnostic("E010", f"illegal character {ch!r}", line, col)
                )

    return LexResult(tokens)
