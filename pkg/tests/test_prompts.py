import pytest

from minifrag.effects import get_effect
from minifrag.lang import Diagnostic, validate
from minifrag.prompts import (
    BlankIntent,
    EmptyFewshot,
    MAX_SYSTEM_PROMPT_BYTES,
    NoDiagnostics,
    PromptBundle,
    build_repair_prompt,
    build_system_prompt,
    build_user_prompt,
    default_fewshot,
)


def test_system_prompt_contains_contract():
    text = build_system_prompt()
    for required in ("uMainTex", "uTime", "uResolution", "vUv", "gl_FragColor"):
        assert required in text


def test_system_prompt_embeds_fewshot_verbatim():
    text = build_system_prompt()
    assert get_effect("passthrough").source.rstrip() in text
    assert get_effect("grayscale").source.rstrip() in text


def test_system_prompt_output_format_instruction():
    assert "exactly one fenced code block" in build_system_prompt()


def test_system_prompt_custom_pitfalls():
    text = build_system_prompt(pitfalls=("no while loops",))
    assert "no while loops" in text


def test_system_prompt_sections_in_order():
    text = build_system_prompt()
    contract = text.index("Binding contract")
    grammar = text.index("Legal language subset")
    pitfalls = text.index("Common pitfalls")
    examples = text.index("Examples")
    fmt = text.index("Output format")
    assert contract < grammar < pitfalls < examples < fmt


def test_system_prompt_deterministic_and_bounded():
    first = build_system_prompt()
    second = build_system_prompt()
    assert first == second
    assert len(first.encode()) <= MAX_SYSTEM_PROMPT_BYTES


def test_fewshot_sources_validate():
    for entry in default_fewshot():
        assert validate(entry.source).ok


def test_empty_fewshot_rejected():
    with pytest.raises(EmptyFewshot):
        build_system_prompt(fewshot=[])


def test_user_prompt_embeds_intent():
    for intent in (
        "I want to see the world with heat vision.",
        "grayscale except green",
    ):
        assert intent in build_user_prompt(intent)


def test_blank_intent_rejected():
    with pytest.raises(BlankIntent):
        build_user_prompt("   ")
    with pytest.raises(BlankIntent):
        build_user_prompt("")


def test_repair_prompt_format():
    diags = [Diagnostic("E003", "undeclared identifier 'col'", 2, 5)]
    text = build_repair_prompt("void main(){}", diags)
    assert "line 2, col 5: [E003]" in text
    assert "void main(){}" in text


def test_repair_prompt_orders_and_includes_all():
    diags = [
        Diagnostic("E004", "later", 7, 3),
        Diagnostic("E003", "first", 2, 5),
        Diagnostic("E006", "middle", 4, 1),
    ] + [Diagnostic("E010", f"extra {i}", 9, i + 1) for i in range(7)]
    text = build_repair_prompt("src", diags)
    positions = [text.index(f"[{code}] ") for code in ("E003", "E006", "E004")]
    assert positions == sorted(positions)
    assert text.count("[E010]") == 7


def test_repair_prompt_requires_diagnostics():
    with pytest.raises(NoDiagnostics):
        build_repair_prompt("src", [])


def test_template_override(tmp_path):
    (tmp_path / "user.txt").write_text("INTENT>>{{intent}}<<")
    assert build_user_prompt("x-ray eyes", template_dir=tmp_path) == "INTENT>>x-ray eyes<<"


def test_bundle_attempt_is_one_based():
    with pytest.raises(ValueError):
        PromptBundle(system="s", user="u", attempt=0)
    assert PromptBundle(system="s", user="u").attempt == 1
