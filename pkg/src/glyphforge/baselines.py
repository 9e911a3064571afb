"""Rule-based reference layouts.

Rule (a) lays every glyph on one horizontal line: uniform box height,
per-glyph width following the glyph aspect ratio, a fixed gap between
neighbors, the whole line centered on the canvas. Rule (b) flips a seeded
coin and emits either rule (a) or its vertical analog. Both rules preserve
glyph aspect ratios exactly, so their Ratio metric is zero by construction,
and boxes never touch, so their Overlap IoU is zero as well.
"""

from __future__ import annotations

import random

from .core import GlyphElement, Layout, NormBox, glyph_aspect_ratio

GAP_FRACTION = 0.02
MAX_FILL_FRACTION = 0.9
MAX_SIDE_FRACTION = 0.5


def _line_layout(
    aspects: list[float],
    canvas_w: int,
    canvas_h: int,
    axis: str,
    gap: float,
    max_fill: float,
    max_side: float,
) -> Layout:
    """Pack boxes along one axis, centered, sized as large as fits."""
    n = len(aspects)
    # Pixel-space math: for a horizontal line, box i is (side * a_i) x side
    # pixels where side is the shared height. Vertical swaps the roles.
    if axis == "horizontal":
        span_px, cross_px = canvas_w, canvas_h
        units = [a for a in aspects]
    else:
        span_px, cross_px = canvas_h, canvas_w
        units = [1.0 / a for a in aspects]

    gap_px = gap * span_px
    budget = max_fill * span_px
    if n > 1 and (n - 1) * gap_px > budget / 2.0:
        # Degenerately long texts: cap total gap at half the budget so the
        # boxes always keep positive size.
        gap_px = budget / (2.0 * (n - 1))
    side = min(max_side * cross_px, (budget - (n - 1) * gap_px) / sum(units))

    extents = [u * side for u in units]
    total = sum(extents) + (n - 1) * gap_px
    cursor = (span_px - total) / 2.0
    cross_lo = (cross_px - side) / 2.0

    boxes = []
    for ext in extents:
        if axis == "horizontal":
            boxes.append(NormBox(
                cursor / span_px,
                cross_lo / cross_px,
                (cursor + ext) / span_px,
                (cross_lo + side) / cross_px,
            ))
        else:
            boxes.append(NormBox(
                cross_lo / cross_px,
                cursor / span_px,
                (cross_lo + side) / cross_px,
                (cursor + ext) / span_px,
            ))
        cursor += ext + gap_px
    return tuple(boxes)


def layout_rule_a(
    glyphs: tuple[GlyphElement, ...],
    canvas_w: int,
    canvas_h: int,
    *,
    gap: float = GAP_FRACTION,
    max_fill: float = MAX_FILL_FRACTION,
    max_side: float = MAX_SIDE_FRACTION,
) -> Layout:
    """Single horizontal line of aspect-true boxes, centered.

    The shared height is the largest value keeping total line width within
    max_fill of the canvas width and the height within max_side of the
    canvas height.
    """
    if not glyphs:
        raise ValueError("rule (a) needs at least one glyph")
    aspects = [glyph_aspect_ratio(g.raster) for g in glyphs]
    return _line_layout(aspects, canvas_w, canvas_h, "horizontal", gap, max_fill, max_side)


def layout_rule_b(
    glyphs: tuple[GlyphElement, ...],
    canvas_w: int,
    canvas_h: int,
    seed: int,
    *,
    gap: float = GAP_FRACTION,
    max_fill: float = MAX_FILL_FRACTION,
    max_side: float = MAX_SIDE_FRACTION,
) -> Layout:
    """Seeded coin flip between rule (a) and its vertical analog.

    Heads reproduces layout_rule_a exactly; tails stacks the glyphs
    top-to-bottom with uniform width instead.
    """
    if not glyphs:
        raise ValueError("rule (b) needs at least one glyph")
    aspects = [glyph_aspect_ratio(g.raster) for g in glyphs]
    axis = "horizontal" if random.Random(seed).random() < 0.5 else "vertical"
    return _line_layout(aspects, canvas_w, canvas_h, axis, gap, max_fill, max_side)


def vertical_line_layout(
    glyphs: tuple[GlyphElement, ...],
    canvas_w: int,
    canvas_h: int,
    *,
    gap: float = GAP_FRACTION,
    max_fill: float = MAX_FILL_FRACTION,
    max_side: float = MAX_SIDE_FRACTION,
) -> Layout:
    """The vertical analog of rule (a): one centered top-to-bottom stack."""
    if not glyphs:
        raise ValueError("vertical line needs at least one glyph")
    aspects = [glyph_aspect_ratio(g.raster) for g in glyphs]
    return _line_layout(aspects, canvas_w, canvas_h, "vertical", gap, max_fill, max_side)
