"""Diagnostic codes and the positioned error records the validator emits."""

from __future__ import annotations

from dataclasses import dataclass

# Fixed catalog; code strings are stable across releases.
CODE_CATALOG = {
    "E001": "missing void main()",
    "E002": "gl_FragColor never assigned",
    "E003": "undeclared identifier",
    "E004": "type mismatch",
    "E005": "unsupported construct",
    "E006": "invalid swizzle",
    "E007": "constructor arity/shape",
    "E008": "uniform/varying outside interface contract",
    "E009": "recursion",
    "E010": "syntax error",
}

# Bounded so repair prompts stay a predictable size.
MAX_DIAGNOSTICS = 10


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int
    col: int
    severity: str = "error"

    def __str__(self) -> str:
        return f"line {self.line}, col {self.col}: [{self.code}] {self.message}"

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "line": self.line,
            "col": self.col,
            "severity": self.severity,
        }


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    """Deterministic order: position first, then code."""
    return sorted(diags, key=lambda d: (d.line, d.col, d.code))
