"""Whole-frame rendering on top of the fragment evaluator.

Output pixel (x, y) gets uv = ((x+0.5)/W, (y+0.5)/H) with y = 0 the bottom
row.  Channels quantize as round-half-up of clamp(c, 0, 1) * 255; NaN
clamps to 0.  Rows may render on a thread pool; output bytes are identical
for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..lang import ValidatedShader
from .image import Image, UniformSet
from .interp import EvalBudgetExceeded, F32, _Texture, eval_lanes


def quantize_channel(values: np.ndarray) -> np.ndarray:
    """float32 [whatever] -> uint8, NaN to 0, then clamp and round-half-up."""
    c = np.where(np.isnan(values), F32(0.0), values)
    c = np.clip(c, F32(0.0), F32(1.0))
    return np.floor(c * F32(255.0) + F32(0.5)).astype(np.uint8)


def render_frame(shader: ValidatedShader, image: Image, time: float = 0.0,
                 threads: int = 1) -> Image:
    """Apply a validated shader to every pixel of an image."""
    w, h = image.width, image.height
    uniforms = UniformSet(main_tex=image, time=time)
    texture = _Texture(image)  # sampler cache shared across all rows
    out = np.empty((h, w, 4), dtype=np.uint8)
    uv_x = ((np.arange(w, dtype=F32) + F32(0.5)) / F32(w)).astype(F32)

    def render_row(y: int) -> None:
        uv = np.empty((w, 2), dtype=F32)
        uv[:, 0] = uv_x
        uv[:, 1] = (F32(y) + F32(0.5)) / F32(h)
        try:
            rgba = eval_lanes(shader, uv, uniforms, texture=texture)
        except EvalBudgetExceeded as err:
            raise EvalBudgetExceeded(err.statements, pixel=(0, y)) from None
        out[h - 1 - y] = quantize_channel(rgba)

    if threads <= 1:
        for y in range(h):
            render_row(y)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # list() propagates the first worker exception
            list(pool.map(render_row, range(h)))

    return Image.from_array(out)
