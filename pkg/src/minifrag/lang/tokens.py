"""Token model and the reserved-word tables of the shader subset."""

from __future__ import annotations

from dataclasses import dataclass, field

IDENT = "identifier"
KEYWORD = "keyword"
FLOAT = "float-literal"
INT = "int-literal"
OP = "operator"
PUNCT = "punctuation"

TYPE_KEYWORDS = frozenset(
    {"float", "int", "bool", "vec2", "vec3", "vec4", "mat3", "sampler2D", "void"}
)

PRECISION_KEYWORDS = frozenset({"lowp", "mediump", "highp"})

# Recognized so the parser can point at them with a clear "unsupported
# construct" diagnostic instead of a generic syntax error.
UNSUPPORTED_KEYWORDS = frozenset(
    {"while", "do", "switch", "struct", "discard", "break", "continue"}
)

KEYWORDS = (
    frozenset(
        {
            "uniform",
            "varying",
            "const",
            "if",
            "else",
            "for",
            "return",
            "precision",
            "true",
            "false",
        }
    )
    | TYPE_KEYWORDS
    | PRECISION_KEYWORDS
    | UNSUPPORTED_KEYWORDS
)

# Longest first so the lexer never splits a two-char operator.
OPERATORS = (
    "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "++", "--",
    "+", "-", "*", "/", "<", ">", "=", "!", "?", ":",
)

PUNCTUATION = ("(", ")", "{", "}", "[", "]", ";", ",", ".", "#")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int = field(compare=False, default=1)
    col: int = field(compare=False, default=1)

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"
