"""RGBA8 raster frames: the unit the reference renderer consumes and emits.

Pixel data is row-major with the top row first (PNG order).  Shader uv
space puts (0,0) at the bottom-left, GL style; the renderer and sampler do
the flip, never the storage.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage


@dataclass(frozen=True)
class Image:
    width: int
    height: int
    data: bytes  # RGBA8, row-major, top row first

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be >= 1, got {self.width}x{self.height}")
        expected = self.width * self.height * 4
        if len(self.data) != expected:
            raise ValueError(
                f"data length {len(self.data)} does not match "
                f"{self.width}x{self.height} RGBA ({expected} bytes)"
            )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Image":
        """(H, W, 4) uint8 array, top row first."""
        if arr.ndim != 3 or arr.shape[2] != 4 or arr.dtype != np.uint8:
            raise ValueError(f"expected (H, W, 4) uint8 array, got {arr.shape} {arr.dtype}")
        h, w = arr.shape[:2]
        return cls(w, h, arr.tobytes())

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width, 4)

    @classmethod
    def filled(cls, width: int, height: int, rgba: tuple) -> "Image":
        arr = np.empty((height, width, 4), dtype=np.uint8)
        arr[:] = np.asarray(rgba, dtype=np.uint8)
        return cls.from_array(arr)

    @classmethod
    def from_png_bytes(cls, blob: bytes) -> "Image":
        with PILImage.open(io.BytesIO(blob)) as im:
            rgba = im.convert("RGBA")
            return cls.from_array(np.asarray(rgba, dtype=np.uint8))

    @classmethod
    def load_png(cls, path) -> "Image":
        with open(path, "rb") as fh:
            return cls.from_png_bytes(fh.read())

    def to_png_bytes(self) -> bytes:
        im = PILImage.frombytes("RGBA", (self.width, self.height), self.data)
        buf = io.BytesIO()
        im.save(buf, format="PNG")
        return buf.getvalue()

    def save_png(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_png_bytes())


@dataclass
class UniformSet:
    """Values bound to the interface contract for one evaluation."""

    main_tex: Image
    time: float = 0.0
    resolution: tuple | None = None  # defaults to main_tex dimensions

    def resolved_resolution(self) -> tuple:
        if self.resolution is not None:
            return (float(self.resolution[0]), float(self.resolution[1]))
        return (float(self.main_tex.width), float(self.main_tex.height))
