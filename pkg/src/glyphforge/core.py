"""Core value types for glyph layout work.

Coordinates are normalized to the canvas: the canvas is the unit square
with the origin at the top-left corner, x growing rightward and y growing
downward. A box is (left, top, right, bottom) with 0 <= left < right <= 1
and 0 <= top < bottom <= 1. Pixel rasters are row-major numpy arrays of
0/1 with shape (height, width).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, NamedTuple

import numpy as np

from .resample import resample_binary

if TYPE_CHECKING:
    from .constraints import ConstraintSet

MAX_GLYPHS = 64


@dataclass(frozen=True)
class NormBox:
    """Axis-aligned box in normalized canvas coordinates."""

    left: float
    top: float
    right: float
    bottom: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.left < self.right <= 1.0):
            raise ValueError(f"invalid horizontal extent: {self.left}..{self.right}")
        if not (0.0 <= self.top < self.bottom <= 1.0):
            raise ValueError(f"invalid vertical extent: {self.top}..{self.bottom}")

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def height(self) -> float:
        return self.bottom - self.top

    @property
    def center(self) -> tuple[float, float]:
        return ((self.left + self.right) / 2.0, (self.top + self.bottom) / 2.0)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.left, self.top, self.right, self.bottom)


class PixelBox(NamedTuple):
    """Half-open pixel rectangle: columns [left, right), rows [top, bottom)."""

    left: int
    top: int
    right: int
    bottom: int

    @property
    def width(self) -> int:
        return self.right - self.left

    @property
    def height(self) -> int:
        return self.bottom - self.top


Layout = tuple[NormBox, ...]


class GlyphRaster:
    """Immutable binary glyph mask.

    The mask is stored as a read-only uint8 array of 0/1 with at least one
    foreground pixel. Construction rejects anything else; callers loading
    grayscale images binarize first (foreground = value >= 128).
    """

    __slots__ = ("mask",)

    def __init__(self, mask: np.ndarray) -> None:
        arr = np.asarray(mask)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("mask must be a nonempty 2-D array")
        if arr.dtype != bool and not ((arr == 0) | (arr == 1)).all():
            raise ValueError("mask values must be 0 or 1")
        arr = np.ascontiguousarray(arr).astype(np.uint8)
        if not arr.any():
            raise ValueError("mask has no foreground pixels")
        arr.flags.writeable = False
        object.__setattr__(self, "mask", arr)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("GlyphRaster is immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GlyphRaster):
            return NotImplemented
        return self.mask.shape == other.mask.shape and bool(np.array_equal(self.mask, other.mask))

    def __repr__(self) -> str:
        return f"GlyphRaster({self.width}x{self.height}, fg={self.foreground_count})"

    @property
    def height(self) -> int:
        return int(self.mask.shape[0])

    @property
    def width(self) -> int:
        return int(self.mask.shape[1])

    @property
    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.mask))

    def tight_box(self) -> PixelBox:
        """Pixel bounding box of the foreground, half-open."""
        rows = np.flatnonzero(self.mask.any(axis=1))
        cols = np.flatnonzero(self.mask.any(axis=0))
        return PixelBox(int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1)

    def tight_content(self) -> np.ndarray:
        """Read-only view of the mask cropped to its tight box."""
        t = self.tight_box()
        return self.mask[t.top:t.bottom, t.left:t.right]


@dataclass(frozen=True)
class GlyphElement:
    """One glyph of a logo: its text plus its binary raster."""

    char: str
    raster: GlyphRaster
    index: int

    def __post_init__(self) -> None:
        if not self.char or any(c.isspace() for c in self.char):
            raise ValueError("char must be a nonempty non-whitespace string")
        if self.index < 0:
            raise ValueError("index must be >= 0")


@dataclass(frozen=True)
class LogoInstance:
    """A logo problem: text, per-glyph rasters, canvas, optional extras.

    `layout` carries ground truth when known; `constraint` carries a parsed
    user constraint when one applies.
    """

    text: str
    glyphs: tuple[GlyphElement, ...]
    canvas_w: int
    canvas_h: int
    layout: Layout | None = None
    constraint: "ConstraintSet | None" = None

    def __post_init__(self) -> None:
        n = len(self.glyphs)
        if not (1 <= n <= MAX_GLYPHS):
            raise ValueError(f"glyph count {n} outside 1..{MAX_GLYPHS}")
        if len(self.text) != n:
            raise ValueError("text length must equal glyph count")
        if self.canvas_w < 1 or self.canvas_h < 1:
            raise ValueError("canvas dims must be >= 1")
        if self.layout is not None and len(self.layout) != n:
            raise ValueError("ground-truth layout length must equal glyph count")

    @property
    def glyph_count(self) -> int:
        return len(self.glyphs)


def box_area(box: NormBox) -> float:
    """Normalized area of a box (fraction of the canvas)."""
    return box.width * box.height


def box_center(box: NormBox) -> tuple[float, float]:
    """Center point of a box in normalized coordinates."""
    return box.center


def box_aspect_ratio(box: NormBox, canvas_w: int, canvas_h: int) -> float:
    """Pixel-space width/height ratio of a box on the given canvas."""
    return (box.width * canvas_w) / (box.height * canvas_h)


def boxes_intersect(a: NormBox, b: NormBox) -> bool:
    """True when the two boxes share interior area."""
    return a.left < b.right and b.left < a.right and a.top < b.bottom and b.top < a.bottom


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def to_pixel_box(box: NormBox, canvas_w: int, canvas_h: int) -> PixelBox:
    """Map a normalized box to integer pixel bounds.

    Edges are scaled, rounded half-up, and clamped to the canvas. A box
    that rounds to zero width or height is widened to one pixel so every
    valid NormBox covers at least one pixel.
    """
    left = min(max(_round_half_up(box.left * canvas_w), 0), canvas_w)
    right = min(max(_round_half_up(box.right * canvas_w), 0), canvas_w)
    top = min(max(_round_half_up(box.top * canvas_h), 0), canvas_h)
    bottom = min(max(_round_half_up(box.bottom * canvas_h), 0), canvas_h)
    if right <= left:
        left = min(max(left, 0), canvas_w - 1)
        right = left + 1
    if bottom <= top:
        top = min(max(top, 0), canvas_h - 1)
        bottom = top + 1
    return PixelBox(left, top, right, bottom)


def glyph_aspect_ratio(g: GlyphRaster) -> float:
    """Width/height ratio of the glyph's tight content box."""
    t = g.tight_box()
    return t.width / t.height


def normalize_glyph(g: GlyphRaster, side: int, mode: str = "square") -> GlyphRaster:
    """Resample a glyph to a side x side frame.

    mode "square" pads the tight content box symmetrically with background
    to a square before resampling, preserving the content aspect ratio.
    mode "tight" stretches the tight content box directly to the frame.
    Either way the result is re-binarized at 0.5.
    """
    if side < 1:
        raise ValueError("side must be >= 1")
    if mode not in ("square", "tight"):
        raise ValueError(f"unknown mode: {mode!r}")
    content = g.tight_content()
    if mode == "square":
        h, w = content.shape
        s = max(h, w)
        framed = np.zeros((s, s), dtype=np.uint8)
        oy = (s - h) // 2
        ox = (s - w) // 2
        framed[oy:oy + h, ox:ox + w] = content
        content = framed
    return GlyphRaster(resample_binary(content, side, side))


def layout_from_boxes(boxes: Iterable[tuple[float, float, float, float]]) -> Layout:
    """Build a Layout from raw (left, top, right, bottom) tuples."""
    return tuple(NormBox(*b) for b in boxes)
