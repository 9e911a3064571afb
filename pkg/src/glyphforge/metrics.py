"""Layout quality metrics.

Three scores, all reported in percent:

* Overlap IoU: 100 * (pixels covered by >= 2 glyphs) / (pixels covered by
  >= 1 glyph), measured on the composed occupancy map. 0 when nothing
  overlaps; 0 by convention when nothing is placed at all.
* Visual Balance: 100 * Euclidean distance between the area-weighted
  centroid of the boxes and the canvas center (0.5, 0.5). Lower is more
  centered.
* Ratio Consistency: mean over glyphs of 100 * |AR_box - AR_glyph| /
  AR_glyph, comparing each pixel-space box aspect to its glyph's tight
  content aspect. 0 means every box matches its glyph exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compositor import OccupancyMap, compose
from .core import (
    GlyphElement,
    Layout,
    LogoInstance,
    box_area,
    box_aspect_ratio,
    glyph_aspect_ratio,
)
from .errors import EmptyLayoutError, LayoutLengthMismatchError


@dataclass(frozen=True)
class MetricReport:
    """Scores for one instance/layout pair."""

    overlap_iou: float
    visual_balance: float
    ratio_consistency: float
    per_glyph_ratio_dev: tuple[float, ...]


def overlap_iou(occ: OccupancyMap) -> float:
    """Percent of covered pixels covered more than once.

    Args:
        occ: occupancy map from compose().

    Returns:
        100 * |counts >= 2| / |counts >= 1|, or 0.0 for an empty canvas.
    """
    covered = int(np.count_nonzero(occ.counts >= 1))
    if covered == 0:
        return 0.0
    doubled = int(np.count_nonzero(occ.counts >= 2))
    return 100.0 * doubled / covered


def visual_balance(layout: Layout, occ: OccupancyMap | None = None) -> float:
    """Percent distance from the area-weighted box centroid to the center.

    The occupancy map is accepted for signature compatibility with the
    other metrics and is not consulted; balance is a box property.
    """
    if not layout:
        raise EmptyLayoutError("visual balance of an empty layout")
    total = 0.0
    mx = 0.0
    my = 0.0
    for b in layout:
        a = box_area(b)
        cx, cy = b.center
        total += a
        mx += a * cx
        my += a * cy
    mx /= total
    my /= total
    return 100.0 * math.hypot(mx - 0.5, my - 0.5)


def ratio_consistency(
    layout: Layout,
    glyphs: tuple[GlyphElement, ...],
    canvas_w: int,
    canvas_h: int,
) -> tuple[float, tuple[float, ...]]:
    """Mean and per-glyph aspect-ratio deviation, in percent.

    Args:
        layout: one box per glyph, reading order.
        glyphs: the glyph elements the boxes belong to.
        canvas_w: canvas width in pixels.
        canvas_h: canvas height in pixels.

    Returns:
        (mean deviation, per-glyph deviations).
    """
    if not layout:
        raise EmptyLayoutError("ratio consistency of an empty layout")
    if len(layout) != len(glyphs):
        raise LayoutLengthMismatchError(
            f"layout has {len(layout)} boxes for {len(glyphs)} glyphs"
        )
    devs = []
    for box, elem in zip(layout, glyphs):
        ar_box = box_aspect_ratio(box, canvas_w, canvas_h)
        ar_glyph = glyph_aspect_ratio(elem.raster)
        devs.append(100.0 * abs(ar_box - ar_glyph) / ar_glyph)
    return sum(devs) / len(devs), tuple(devs)


def evaluate(instance: LogoInstance, layout: Layout) -> MetricReport:
    """Compose once and score all three metrics for one layout."""
    occ = compose(instance, layout)
    ratio_mean, per_glyph = ratio_consistency(
        layout, instance.glyphs, instance.canvas_w, instance.canvas_h
    )
    return MetricReport(
        overlap_iou=overlap_iou(occ),
        visual_balance=visual_balance(layout, occ),
        ratio_consistency=ratio_mean,
        per_glyph_ratio_dev=per_glyph,
    )
