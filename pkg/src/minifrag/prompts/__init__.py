"""Prompt assembly for the shader-generating model.

All three prompts are deterministic pure text: same inputs, same bytes.
Templates live next to this module as {{placeholder}} text files and can
be overridden per deployment with a template directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..effects import get_effect
from ..lang import DEFAULT_CONTRACT, InterfaceContract

MAX_SYSTEM_PROMPT_BYTES = 16 * 1024

# One prose line per checker code, so the model is warned about exactly
# what the validator will reject.
DEFAULT_PITFALLS = (
    "Define `void main()` with no parameters; it is the only entry point.",
    "Always assign gl_FragColor; a shader that never writes it is rejected.",
    "Declare every variable before use, and declare the uniforms/varyings you read.",
    "No implicit int/float conversion: write 1.0 not 1 in float math, and use float(i) to convert.",
    "No while/do/switch/structs/arrays/preprocessor lines; for-loops need integer literal bounds counting upward.",
    "Swizzles use one letter set (.rgb or .xyz, up to 4 components) and must stay within the vector's size.",
    "Vector constructors need exactly the right component count, e.g. vec3 takes 1 or 3 scalars or vec2+scalar; mat3 is column-major.",
    "Only the contract uniforms/varyings may be declared: uMainTex, uTime, uResolution, vUv.",
    "No recursion, direct or mutual.",
    "Declare constants inside functions; there are no global const declarations.",
)

GRAMMAR_SUMMARY = """\
GLSL ES 1.00 restricted to: optional `precision mediump float;`, uniform
and varying declarations, and function definitions. Types: float, int,
bool, vec2, vec3, vec4, mat3 (sampler2D only as a uniform). Statements:
variable declarations (one name each, optional const), assignments
(=, +=, -=, *=, /=, optionally through a swizzle), if/else, return, blocks,
and for-loops of the exact shape
`for (int i = <intlit>; i < <intlit>; i++)` (also <=, --, += <intlit>).
Expressions: literals, variables, swizzles, unary -/!, binary
arithmetic/comparison/logic with C precedence, ?:, function calls.
Built-ins: sin, cos, abs, floor, fract, mod, pow, exp, sqrt, min, max,
clamp, mix, step, smoothstep, dot, length, distance, normalize,
texture2D(uMainTex, uv); mat3*vec3; scalar-vector +,-,*,/ broadcasting.
User-defined helper functions are allowed (value parameters, no recursion).
"""


class PromptError(ValueError):
    pass


class EmptyFewshot(PromptError):
    pass


class BlankIntent(PromptError):
    pass


class NoDiagnostics(PromptError):
    pass


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str
    attempt: int = 1

    def __post_init__(self):
        if self.attempt < 1:
            raise ValueError("attempt is 1-based")


def _load_template(name: str, template_dir: Path | None) -> str:
    if template_dir is not None:
        override = Path(template_dir) / f"{name}.txt"
        if override.exists():
            return override.read_text()
    return resources.files("minifrag.prompts").joinpath("templates", f"{name}.txt").read_text()


def _fill(template: str, values: dict) -> str:
    out = template
    for key, value in values.items():
        out = out.replace("{{" + key + "}}", value)
    return out


def _contract_text(contract: InterfaceContract) -> str:
    lines = [f"- uniform {type_} {name};" for name, type_ in sorted(contract.uniforms.items())]
    lines += [f"- varying {type_} {name};" for name, type_ in sorted(contract.varyings.items())]
    lines.append(f"- output: {contract.output_name} ({contract.output_type})")
    return "\n".join(lines)


def default_fewshot() -> list:
    """Smallest pair that demonstrates both sampling and channel math."""
    return [get_effect("passthrough"), get_effect("grayscale")]


def build_system_prompt(
    contract: InterfaceContract = DEFAULT_CONTRACT,
    fewshot: list | None = None,
    pitfalls: tuple = DEFAULT_PITFALLS,
    template_dir: Path | None = None,
) -> str:
    if fewshot is None:
        fewshot = default_fewshot()
    if not fewshot:
        raise EmptyFewshot("at least one example shader is required")

    examples = []
    for entry in fewshot:
        examples.append(f"{entry.title}:\n\n```glsl\n{entry.source.rstrip()}\n```")

    text = _fill(
        _load_template("system", template_dir),
        {
            "contract": _contract_text(contract),
            "grammar": GRAMMAR_SUMMARY.rstrip(),
            "pitfalls": "\n".join(f"- {p}" for p in pitfalls),
            "examples": "\n\n".join(examples),
        },
    )
    if len(text.encode()) > MAX_SYSTEM_PROMPT_BYTES:
        raise PromptError(
            f"system prompt is {len(text.encode())} bytes "
            f"(limit {MAX_SYSTEM_PROMPT_BYTES})"
        )
    return text


def build_user_prompt(intent: str, template_dir: Path | None = None) -> str:
    if not intent or not intent.strip():
        raise BlankIntent("intent is blank")
    return _fill(_load_template("user", template_dir), {"intent": intent.strip()})


def build_repair_prompt(
    previous_source: str,
    diagnostics: list,
    template_dir: Path | None = None,
) -> str:
    if not diagnostics:
        raise NoDiagnostics("repair prompt needs at least one diagnostic")
    ordered = sorted(diagnostics, key=lambda d: (d.line, d.col))
    listing = "\n".join(
        f"line {d.line}, col {d.col}: [{d.code}] {d.message}" for d in ordered
    )
    return _fill(
        _load_template("repair", template_dir),
        {"source": previous_source.rstrip(), "diagnostics": listing},
    )


__all__ = [
    "BlankIntent",
    "DEFAULT_PITFALLS",
    "EmptyFewshot",
    "GRAMMAR_SUMMARY",
    "MAX_SYSTEM_PROMPT_BYTES",
    "NoDiagnostics",
    "PromptBundle",
    "PromptError",
    "build_repair_prompt",
    "build_system_prompt",
    "build_user_prompt",
    "default_fewshot",
]
