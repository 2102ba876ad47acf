"""MiniFrag: a bounded fragment-shader subset of GLSL ES 1.00.

`validate` is the compile gate: tokenize -> parse -> check.  Anything it
accepts is safe to hand to the interpreter and, unmodified, to a WebGL 1
context.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import nodes
from .checker import BUILTIN_FUNCTIONS, MAX_LOOP_ITERATIONS, check
from .contract import DEFAULT_CONTRACT, InterfaceContract
from .diagnostics import CODE_CATALOG, MAX_DIAGNOSTICS, Diagnostic, sort_diagnostics
from .lexer import tokenize
from .parser import parse
from .printer import format_expr, format_program
from .tokens import Token


@dataclass(frozen=True)
class ValidatedShader:
    """A shader that passed every static check.

    The evaluator accepts only this type; constructing one by hand defeats
    the soundness gate, so don't.
    """

    source: str
    program: nodes.Program = field(compare=False)
    contract: InterfaceContract = field(compare=False, default=DEFAULT_CONTRACT)


@dataclass
class ValidationResult:
    shader: ValidatedShader | None
    diagnostics: list

    @property
    def ok(self) -> bool:
        return self.shader is not None


def validate(source: str, contract: InterfaceContract = DEFAULT_CONTRACT) -> ValidationResult:
    """Run the full compile gate over raw shader text.

    Returns either a ValidatedShader or the (sorted, capped) diagnostics
    explaining the rejection.  Pure: identical input gives identical output.
    """
    lexed = tokenize(source)
    if not lexed.ok:
        return ValidationResult(None, [lexed.error])

    parsed = parse(lexed.tokens)
    if parsed.program is None:
        diags = sort_diagnostics(parsed.diagnostics)[:MAX_DIAGNOSTICS]
        return ValidationResult(None, diags)

    diags = check(parsed.program, contract)
    if diags:
        return ValidationResult(None, sort_diagnostics(diags)[:MAX_DIAGNOSTICS])

    return ValidationResult(ValidatedShader(source, parsed.program, contract), [])


def serialize_ast(shader: ValidatedShader) -> str:
    """Canonical byte-stable rendering of the validated tree."""
    return format_program(shader.program)


__all__ = [
    "BUILTIN_FUNCTIONS",
    "CODE_CATALOG",
    "DEFAULT_CONTRACT",
    "Diagnostic",
    "InterfaceContract",
    "MAX_DIAGNOSTICS",
    "MAX_LOOP_ITERATIONS",
    "Token",
    "ValidatedShader",
    "ValidationResult",
    "check",
    "format_expr",
    "format_program",
    "nodes",
    "parse",
    "serialize_ast",
    "sort_diagnostics",
    "tokenize",
    "validate",
]
