"""Closed-form per-pixel oracles for every library effect.

This module never touches the shader interpreter: the math is written
directly against numpy in float64, including its own bilinear sampler, so
interpreter/oracle agreement is evidence rather than tautology.
"""

from __future__ import annotations

import numpy as np

from ..eval.image import Image

LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])

# Rows of the red-deficiency channel mix (each row sums to 1).
PROTANOPIA_MATRIX = np.array(
    [
        [0.56667, 0.43333, 0.0],
        [0.55833, 0.44167, 0.0],
        [0.0, 0.24167, 0.75833],
    ]
)

KEEP_GREEN_HUE_LO = 90.0
KEEP_GREEN_HUE_HI = 150.0
KEEP_GREEN_MIN_SAT = 0.15

HEAT_COLD = np.array([0.0, 0.0, 1.0])
HEAT_HOT = np.array([1.0, 0.0, 0.0])

UNDERWATER_TINT = np.array([0.6, 0.8, 1.0])


class UnknownEffect(KeyError):
    pass


def _luma(rgb: np.ndarray) -> np.ndarray:
    return rgb @ LUMA_WEIGHTS


def _color_passthrough(rgba, uv, time):
    return rgba.copy()


def _color_invert(rgba, uv, time):
    out = rgba.copy()
    out[..., :3] = 1.0 - rgba[..., :3]
    return out


def _color_grayscale(rgba, uv, time):
    out = rgba.copy()
    y = _luma(rgba[..., :3])
    out[..., :3] = y[..., None]
    return out


def _color_protanopia(rgba, uv, time):
    out = rgba.copy()
    out[..., :3] = rgba[..., :3] @ PROTANOPIA_MATRIX.T
    return out


def _hsv_hue_sat(rgb: np.ndarray):
    """Hue in degrees and saturation, replicating the shader's branch order
    (red checked first on max-channel ties)."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.maximum(r, np.maximum(g, b))
    minc = np.minimum(r, np.minimum(g, b))
    delta = maxc - minc
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(delta > 0, delta, 1.0)
        h_r = 60.0 * np.mod((g - b) / safe, 6.0)
        h_g = 60.0 * ((b - r) / safe + 2.0)
        h_b = 60.0 * ((r - g) / safe + 4.0)
        sat = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)
    hue = np.where(maxc == r, h_r, np.where(maxc == g, h_g, h_b))
    hue = np.where(delta > 0, hue, 0.0)
    return hue, sat


def _color_keep_green(rgba, uv, time):
    out = rgba.copy()
    rgb = rgba[..., :3]
    hue, sat = _hsv_hue_sat(rgb)
    keep = (hue >= KEEP_GREEN_HUE_LO) & (hue <= KEEP_GREEN_HUE_HI) & (sat >= KEEP_GREEN_MIN_SAT)
    y = _luma(rgb)
    gray = np.repeat(y[..., None], 3, axis=-1)
    out[..., :3] = np.where(keep[..., None], rgb, gray)
    return out


def _color_heat_vision(rgba, uv, time):
    out = rgba.copy()
    y = _luma(rgba[..., :3])[..., None]
    out[..., :3] = HEAT_COLD * (1.0 - y) + HEAT_HOT * y
    return out


def _color_underwater(rgba, uv, time):
    out = rgba.copy()
    out[..., :3] = rgba[..., :3] * UNDERWATER_TINT
    return out


def _uv_identity(uv, time):
    return uv


def _uv_underwater(uv, time):
    out = np.array(uv, dtype=np.float64, copy=True)
    out[..., 0] = uv[..., 0] + 0.01 * np.sin(40.0 * uv[..., 1] + 2.0 * time)
    return out


# name -> (source-uv transform, color transform)
_ORACLES = {
    "passthrough": (_uv_identity, _color_passthrough),
    "invert": (_uv_identity, _color_invert),
    "grayscale": (_uv_identity, _color_grayscale),
    "protanopia": (_uv_identity, _color_protanopia),
    "keep_green": (_uv_identity, _color_keep_green),
    "heat_vision": (_uv_identity, _color_heat_vision),
    "underwater": (_uv_underwater, _color_underwater),
}


def oracle_names() -> list:
    return list(_ORACLES)


def oracle_apply(name: str, rgba, uv=(0.5, 0.5), time: float = 0.0) -> tuple:
    """The per-pixel color mapping for one already-sampled rgba value."""
    if name not in _ORACLES:
        raise UnknownEffect(name)
    _, color = _ORACLES[name]
    arr = np.asarray(rgba, dtype=np.float64)
    out = color(arr, np.asarray(uv, dtype=np.float64), time)
    return tuple(float(v) for v in out)


def _bilinear64(texels: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Independent float64 clamp-to-edge bilinear sampler over bottom-up
    texel rows."""
    h, w = texels.shape[:2]
    x = u * w - 0.5
    y = v * h - 0.5
    x0f = np.floor(x)
    y0f = np.floor(y)
    fx = (x - x0f)[..., None]
    fy = (y - y0f)[..., None]
    x0 = np.clip(x0f, 0, w - 1).astype(int)
    x1 = np.clip(x0f + 1, 0, w - 1).astype(int)
    y0 = np.clip(y0f, 0, h - 1).astype(int)
    y1 = np.clip(y0f + 1, 0, h - 1).astype(int)
    row0 = texels[y0, x0] * (1.0 - fx) + texels[y0, x1] * fx
    row1 = texels[y1, x0] * (1.0 - fx) + texels[y1, x1] * fx
    return row0 * (1.0 - fy) + row1 * fy


def oracle_render(name: str, image: Image, time: float = 0.0) -> Image:
    """Full-frame oracle: displacement, independent resampling, color math,
    and the same quantization contract as the renderer."""
    if name not in _ORACLES:
        raise UnknownEffect(name)
    uv_fn, color_fn = _ORACLES[name]

    w, h = image.width, image.height
    texels = image.to_array().astype(np.float64)[::-1] / 255.0  # bottom-up rows

    xs = (np.arange(w) + 0.5) / w
    ys = (np.arange(h) + 0.5) / h
    uv = np.empty((h, w, 2), dtype=np.float64)
    uv[..., 0] = xs[None, :]
    uv[..., 1] = ys[:, None]

    src = uv_fn(uv, time)
    sampled = _bilinear64(texels, src[..., 0], src[..., 1])
    rgba = color_fn(sampled, uv, time)

    rgba = np.where(np.isnan(rgba), 0.0, rgba)
    bytes_bottom_up = np.floor(np.clip(rgba, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    return Image.from_array(bytes_bottom_up[::-1].copy())
