"""Feature-matrix heatmaps as PNG bytes.

Hand-rolled PNG encoding (stdlib zlib) keeps output byte-deterministic:
equal matrices produce identical files, which the pipeline reports rely on.
"""
from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import EmptyMatrix
from .features import FeatureMatrix

__all__ = ["render_heatmap"]

# viridis anchor colors, evenly spaced over [0, 1]
_VIRIDIS = np.array([
    (0.267, 0.005, 0.329),
    (0.283, 0.141, 0.458),
    (0.254, 0.265, 0.530),
    (0.207, 0.372, 0.553),
    (0.164, 0.471, 0.558),
    (0.128, 0.567, 0.551),
    (0.135, 0.659, 0.518),
    (0.267, 0.749, 0.441),
    (0.478, 0.821, 0.318),
    (0.741, 0.873, 0.150),
    (0.993, 0.906, 0.144),
])


def render_heatmap(matrix: FeatureMatrix, colormap: str = "viridis_like") -> bytes:
    """Render a matrix as a width=frames, height=rows PNG, row 0 at the bottom.

    Values are min-max scaled per matrix; a constant matrix renders as a
    uniform image at the low end of the map.
    """
    data = matrix.data
    if data.shape[0] == 0 or data.shape[1] == 0:
        raise EmptyMatrix("cannot render an empty matrix")
    lo, hi = data.min(), data.max()
    unit = (data - lo) / (hi - lo) if hi > lo else np.zeros_like(data)
    rgb = _apply_colormap(unit, colormap)
    flipped = rgb[::-1]  # row 0 at the bottom of the image
    return _encode_png(flipped)


def _apply_colormap(unit: np.ndarray, colormap: str) -> np.ndarray:
    if colormap == "gray":
        v = np.rint(unit * 255.0).astype(np.uint8)
        return np.stack([v, v, v], axis=-1)
    if colormap != "viridis_like":
        raise ValueError(f"unknown colormap {colormap!r}")
    pos = unit * (len(_VIRIDIS) - 1)
    idx = np.minimum(pos.astype(int), len(_VIRIDIS) - 2)
    frac = (pos - idx)[..., None]
    color = _VIRIDIS[idx] * (1.0 - frac) + _VIRIDIS[idx + 1] * frac
    return np.rint(color * 255.0).astype(np.uint8)


def _encode_png(rgb: np.ndarray) -> bytes:
    height, width = rgb.shape[:2]
    raw = b"".join(b"\x00" + rgb[r].tobytes() for r in range(height))
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", zlib.compress(raw, 9))
        + _png_chunk(b"IEND", b"")
    )


def _png_chunk(tag: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + tag
        + body
        + struct.pack(">I", zlib.crc32(tag + body) & 0xFFFFFFFF)
    )
