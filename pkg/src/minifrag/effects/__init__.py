"""Canonical effect catalog: validated shader sources with closed-form
oracles, used for few-shot prompting and as ground truth in tests."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .oracles import UnknownEffect, oracle_apply, oracle_names, oracle_render
from .testcard import CARD_SIZE, GREEN_PATCH, PATCH_COLORS, RED_PATCH, make_test_card, patch_center_uv


@dataclass(frozen=True)
class EffectEntry:
    name: str
    title: str
    source: str
    tags: tuple

    def oracle(self, rgba, uv=(0.5, 0.5), time: float = 0.0) -> tuple:
        return oracle_apply(self.name, rgba, uv, time)


def _fixture_text(filename: str) -> str:
    return resources.files("minifrag.effects").joinpath("fixtures", filename).read_text()


@lru_cache(maxsize=1)
def _catalog() -> dict:
    entries = {}
    for line in _fixture_text("manifest.txt").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, title, tags = (part.strip() for part in line.split("|"))
        entries[name] = EffectEntry(
            name=name,
            title=title,
            source=_fixture_text(f"{name}.frag"),
            tags=tuple(t.strip() for t in tags.split(",")),
        )
    missing = set(oracle_names()) ^ set(entries)
    if missing:  # manifest and oracle table must always agree
        raise RuntimeError(f"effect catalog out of sync: {sorted(missing)}")
    return entries


def list_effects() -> list:
    return list(_catalog())


def get_effect(name: str) -> EffectEntry:
    try:
        return _catalog()[name]
    except KeyError:
        raise UnknownEffect(name) from None


def effect_source(name: str) -> str:
    return get_effect(name).source


__all__ = [
    "CARD_SIZE",
    "EffectEntry",
    "GREEN_PATCH",
    "PATCH_COLORS",
    "RED_PATCH",
    "UnknownEffect",
    "effect_source",
    "get_effect",
    "list_effects",
    "make_test_card",
    "oracle_apply",
    "oracle_render",
    "patch_center_uv",
]
