#!/usr/bin/env python3
"""End-to-end offline walkthrough with the mock provider: a canned model
response for "grayscale except green" is generated, validated, stored, and
rendered over the test card.  No network, no key.

    python scripts/offline_demo.py --workdir out/demo
"""

import argparse
from pathlib import Path

from minifrag.effects import effect_source, make_test_card
from minifrag.eval import render_frame
from minifrag.jobs import generate_shader
from minifrag.lang import validate
from minifrag.llm import ProviderConfig, make_provider
from minifrag.store import ArtifactStore


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", type=Path, default=Path("out/demo"))
    args = parser.parse_args()

    fixtures = args.workdir / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    response = "Here is the shader:\n```glsl\n" + effect_source("keep_green") + "```\n"
    (fixtures / "001.txt").write_text(response)

    store = ArtifactStore(args.workdir / "store")
    provider = make_provider(ProviderConfig(kind="mock", fixtures=fixtures))

    intent = "I want to see things in grayscale except green"
    artifact = generate_shader(intent, provider, store)
    print(f"artifact {artifact.id} stored after {artifact.attempts_used} attempt(s)")
    print(f"  intent: {artifact.intent}")
    print(f"  source: {store.root / artifact.id / 'shader.frag'}")

    card = make_test_card()
    shader = validate(artifact.source).shader
    out_png = args.workdir / "keep_green_card.png"
    render_frame(shader, card).save_png(out_png)
    print(f"  render: {out_png}")


if __name__ == "__main__":
    main()
