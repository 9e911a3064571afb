"""Pixel composition of glyph layouts.

Each glyph's tight content box is resampled bilinearly into its target
pixel box, re-binarized at 0.5, and painted onto a shared canvas. The
result is an occupancy map: per-pixel coverage counts plus the individual
placed masks, which is everything the metric suite needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .core import GlyphRaster, Layout, LogoInstance, NormBox, to_pixel_box
from .errors import LayoutLengthMismatchError
from .resample import resample_binary

BACKGROUND_VALUE = 255
FOREGROUND_VALUE = 0
COLLISION_VALUE = 128

# 16 fixed colors for the palette render mode, cycled by glyph index.
PALETTE = (
    (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40),
    (148, 103, 189), (140, 86, 75), (227, 119, 194), (127, 127, 127),
    (188, 189, 34), (23, 190, 207), (174, 199, 232), (255, 187, 120),
    (152, 223, 138), (255, 152, 150), (197, 176, 213), (196, 156, 148),
)


@dataclass(frozen=True)
class OccupancyMap:
    """Coverage counts for a composed layout.

    counts[y, x] is the number of glyphs covering that pixel; placed holds
    each glyph's full-canvas boolean mask in glyph order.
    """

    counts: np.ndarray
    placed: tuple[np.ndarray, ...]

    @property
    def canvas_h(self) -> int:
        return int(self.counts.shape[0])

    @property
    def canvas_w(self) -> int:
        return int(self.counts.shape[1])


def place_glyph(g: GlyphRaster, box: NormBox, canvas_w: int, canvas_h: int) -> np.ndarray:
    """Render one glyph into its box on an otherwise empty canvas.

    Returns a boolean (canvas_h, canvas_w) mask: the glyph's tight content
    resampled bilinearly to the pixel box and thresholded at 0.5.
    """
    px = to_pixel_box(box, canvas_w, canvas_h)
    stamp = resample_binary(g.tight_content(), px.height, px.width)
    out = np.zeros((canvas_h, canvas_w), dtype=bool)
    out[px.top:px.bottom, px.left:px.right] = stamp.astype(bool)
    return out


def compose(instance: LogoInstance, layout: Layout) -> OccupancyMap:
    """Place every glyph of an instance according to a layout.

    Raises LayoutLengthMismatchError when the box count differs from the
    glyph count.
    """
    if len(layout) != instance.glyph_count:
        raise LayoutLengthMismatchError(
            f"layout has {len(layout)} boxes for {instance.glyph_count} glyphs"
        )
    counts = np.zeros((instance.canvas_h, instance.canvas_w), dtype=np.int16)
    placed = []
    for elem, box in zip(instance.glyphs, layout):
        mask = place_glyph(elem.raster, box, instance.canvas_w, instance.canvas_h)
        counts += mask
        placed.append(mask)
    return OccupancyMap(counts=counts, placed=tuple(placed))


def render_array(occ: OccupancyMap, palette: bool = False) -> np.ndarray:
    """Rasterize an occupancy map to image pixels.

    Grayscale mode returns (H, W) uint8: background 255, single-glyph
    coverage 0, collisions 128. Palette mode returns (H, W, 3) uint8 with
    one of 16 fixed colors per glyph index, collisions mid-gray.
    """
    if not palette:
        img = np.full(occ.counts.shape, BACKGROUND_VALUE, dtype=np.uint8)
        img[occ.counts >= 1] = FOREGROUND_VALUE
        img[occ.counts >= 2] = COLLISION_VALUE
        return img
    img = np.full((*occ.counts.shape, 3), BACKGROUND_VALUE, dtype=np.uint8)
    for i, mask in enumerate(occ.placed):
        img[mask] = PALETTE[i % len(PALETTE)]
    img[occ.counts >= 2] = (COLLISION_VALUE,) * 3
    return img


def render_png(occ: OccupancyMap, path: str | Path, palette: bool = False) -> None:
    """Write the rendered occupancy map as a PNG file."""
    arr = render_array(occ, palette=palette)
    Image.fromarray(arr, mode="RGB" if palette else "L").save(Path(path), format="PNG")
