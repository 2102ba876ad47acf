"""The standard 64x64 test card: twelve 16x16 color patches over a
horizontal luminance gradient.

Every oracle, parity, and golden-file check renders this card, so its
definition is frozen; patch colors are chosen to sit safely away from the
keep_green hue/saturation thresholds.
"""

from __future__ import annotations

import numpy as np

from ..eval.image import Image

CARD_SIZE = 64
PATCH = 16

# 4 columns x 3 rows, listed top-down in display order.
PATCH_COLORS = (
    (255, 0, 0), (0, 255, 0), (0, 0, 255), (255, 255, 255),
    (0, 0, 0), (255, 255, 0), (0, 255, 255), (255, 0, 255),
    (128, 128, 128), (0, 128, 0), (255, 128, 0), (64, 128, 255),
)

# Patch grid coordinates (col, row) for named patches used in tests.
RED_PATCH = (0, 0)
GREEN_PATCH = (1, 0)


def make_test_card() -> Image:
    arr = np.zeros((CARD_SIZE, CARD_SIZE, 4), dtype=np.uint8)
    arr[:, :, 3] = 255
    for idx, rgb in enumerate(PATCH_COLORS):
        row, col = divmod(idx, 4)
        y0, x0 = row * PATCH, col * PATCH
        arr[y0 : y0 + PATCH, x0 : x0 + PATCH, :3] = rgb
    ramp = np.round(np.arange(CARD_SIZE) * 255 / (CARD_SIZE - 1)).astype(np.uint8)
    arr[3 * PATCH :, :, 0] = ramp
    arr[3 * PATCH :, :, 1] = ramp
    arr[3 * PATCH :, :, 2] = ramp
    return Image.from_array(arr)


def patch_center_uv(col: int, row: int) -> tuple:
    """uv of a patch center (bottom-left origin, like the shaders see it)."""
    x = col * PATCH + PATCH // 2
    y_top = row * PATCH + PATCH // 2
    y = CARD_SIZE - 1 - y_top
    return ((x + 0.5) / CARD_SIZE, (y + 0.5) / CARD_SIZE)
