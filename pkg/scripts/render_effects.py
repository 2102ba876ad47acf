#!/usr/bin/env python3
"""Render every library effect over an input image (default: the test
card) and write the frames side by side into an output directory.

    python scripts/render_effects.py --out out/effects [--in photo.png] [--time 1.7]
"""

import argparse
from pathlib import Path

from minifrag.effects import effect_source, list_effects, make_test_card
from minifrag.eval import Image, render_frame
from minifrag.lang import validate


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="input", type=Path, default=None)
    parser.add_argument("--out", type=Path, default=Path("out/effects"))
    parser.add_argument("--time", type=float, default=0.0)
    args = parser.parse_args()

    frame = Image.load_png(args.input) if args.input else make_test_card()
    args.out.mkdir(parents=True, exist_ok=True)
    frame.save_png(args.out / "input.png")

    for name in list_effects():
        shader = validate(effect_source(name)).shader
        rendered = render_frame(shader, frame, args.time, threads=4)
        path = args.out / f"{name}.png"
        rendered.save_png(path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
