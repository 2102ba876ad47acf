#!/usr/bin/env python3
"""Write the standard 64x64 test card to a PNG (the frontend bundles a
copy as a static asset for its GPU parity check).

    python scripts/export_testcard.py [path]
"""

import sys
from pathlib import Path

from minifrag.effects import make_test_card


def main() -> None:
    path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("testcard.png")
    make_test_card().save_png(path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
