"""Synthetic dataset generation and RGBA logo ingestion.

Pseudo-glyphs are deterministic stroke composites (bars and arcs grown
from a connected seed stroke), so tests never depend on font files.
Template layouts place them in named arrangements with jittered gaps and
emit the matching constraint text and descriptions. synthesize_dataset
writes the on-disk dataset format; ingest_rgba goes the other way,
segmenting a real RGBA image into per-glyph masks and ground-truth boxes.

Boxes written by the generator sit on the integer pixel grid of a fixed
1000 x 1000 canvas and each stored mask is tight-cropped to its box, so
box aspect ratios equal glyph aspect ratios identically and coordinates
survive 4-decimal serialization without loss.
"""

from __future__ import annotations

import hashlib
import math
import random
import re
import string
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from .constraints import ConstraintSet, check_constraint, render_constraint
from .core import (
    GlyphElement,
    GlyphRaster,
    Layout,
    LogoInstance,
    NormBox,
    boxes_intersect,
    to_pixel_box,
)
from .errors import (
    GlyphCountMismatchError,
    NoAlphaChannelError,
    TemplateIncompatibleError,
)
from .resample import resample_binary
from .schema import (
    Annotation,
    DatasetManifest,
    SampleInfo,
    annotation_to_json,
    manifest_to_json,
    record_from_layout,
)
from .solver import describe_layout, seed_layout

SYNTH_CANVAS = 1000
TEMPLATE_NAMES = ("horizontal", "vertical", "two_row", "staircase", "grid", "emphasis_first")

_MERGE_GAP_FRACTION = 0.02
_MERGE_OVERLAP_FRACTION = 0.5
_ROW_SPLIT_FRACTION = 0.05


def _stamp_bar(grid: np.ndarray, y: int, x: int, length: int, thickness: int, axis: str) -> None:
    h, w = grid.shape
    if axis == "h":
        y0 = max(0, min(y, h - thickness))
        grid[y0:y0 + thickness, max(0, x):min(w, x + length)] = 1
    else:
        x0 = max(0, min(x, w - thickness))
        grid[max(0, y):min(h, y + length), x0:x0 + thickness] = 1


def _stamp_diagonal(grid: np.ndarray, y: int, x: int, length: int, thickness: int,
                    sy: int, sx: int) -> None:
    h, w = grid.shape
    for i in range(length):
        yy, xx = y + i * sy, x + i * sx
        grid[max(0, yy):min(h, yy + thickness), max(0, xx):min(w, xx + thickness)] = 1


def _stamp_arc(grid: np.ndarray, ay: int, ax: int, radius: int, thickness: int,
               rng: random.Random) -> None:
    """Ring segment through the anchor pixel (ay, ax)."""
    h, w = grid.shape
    theta = rng.uniform(0.0, 2.0 * math.pi)
    cy = ay + radius * math.sin(theta)
    cx = ax + radius * math.cos(theta)
    extent = rng.uniform(math.pi / 2.0, 2.0 * math.pi)
    anchor_angle = math.atan2(ay - cy, ax - cx)
    ys, xs = np.ogrid[:h, :w]
    dist = np.hypot(ys - cy, xs - cx)
    ring = np.abs(dist - radius) <= thickness / 2.0
    angles = np.arctan2(ys - cy, xs - cx)
    diff = np.abs((angles - anchor_angle + math.pi) % (2.0 * math.pi) - math.pi)
    grid[ring & (diff <= extent / 2.0)] = 1


def _anchor(grid: np.ndarray, rng: random.Random) -> tuple[int, int]:
    flat = np.flatnonzero(grid)
    idx = int(flat[rng.randrange(len(flat))])
    return idx // grid.shape[1], idx % grid.shape[1]


def _tight_aspect(grid: np.ndarray) -> float:
    ys, xs = np.nonzero(grid)
    return (int(xs.max()) - int(xs.min()) + 1) / (int(ys.max()) - int(ys.min()) + 1)


def pseudo_glyph(seed: int, complexity: int) -> GlyphRaster:
    """Deterministic stroke-composite glyph mask.

    Draws `complexity` strokes (axis-aligned bars, diagonal bars, arcs) on
    a 64..256 px grid, each anchored to the existing foreground so the
    mask stays connected, then patches the tight aspect ratio into
    [0.3, 3] with extra bars if needed.
    """
    if not 1 <= complexity <= 8:
        raise ValueError("complexity must be in 1..8")
    rng = random.Random(seed)
    h = rng.randrange(64, 257)
    w = rng.randrange(64, 257)
    grid = np.zeros((h, w), dtype=np.uint8)

    length = rng.randrange(min(h, w) // 2, min(h, w))
    thickness = max(-(-length // 3), 8)
    axis = rng.choice(("h", "v"))
    y = rng.randrange(0, max(1, h - thickness))
    x = rng.randrange(0, max(1, w - thickness))
    _stamp_bar(grid, y, x, length, thickness, axis)

    for _ in range(complexity - 1):
        ay, ax = _anchor(grid, rng)
        kind = rng.choice(("bar", "bar", "diag", "arc"))
        length = rng.randrange(min(h, w) // 3, min(h, w))
        thickness = max(length // 3, 6)
        if kind == "bar":
            axis = rng.choice(("h", "v"))
            if axis == "h":
                _stamp_bar(grid, ay, ax - rng.randrange(length), length, thickness, "h")
            else:
                _stamp_bar(grid, ay - rng.randrange(length), ax, length, thickness, "v")
        elif kind == "diag":
            steps = max(length // 2, 8)
            _stamp_diagonal(grid, ay, ax, steps, thickness,
                            rng.choice((-1, 1)), rng.choice((-1, 1)))
        else:
            radius = rng.randrange(min(h, w) // 6, min(h, w) // 3)
            _stamp_arc(grid, ay, ax, radius, max(radius // 2, 6), rng)

    for _ in range(4):
        ar = _tight_aspect(grid)
        if 0.3 <= ar <= 3.0:
            break
        ay, ax = _anchor(grid, rng)
        ys, xs = np.nonzero(grid)
        if ar > 3.0:
            length = (int(xs.max()) - int(xs.min()) + 1) // 2
            _stamp_bar(grid, ay - length // 2, ax, length, max(length // 3, 6), "v")
        else:
            length = (int(ys.max()) - int(ys.min()) + 1) // 2
            _stamp_bar(grid, ay, ax - length // 2, length, max(length // 3, 6), "h")

    return GlyphRaster(grid)


def _template_constraint(template: str, n: int) -> ConstraintSet:
    m = re.fullmatch(r"grid\((\d+),\s*(\d+)\)", template)
    if m:
        return ConstraintSet(arrangement="grid", rows=int(m.group(1)), cols=int(m.group(2)))
    if template == "horizontal":
        return ConstraintSet(arrangement="horizontal_line")
    if template == "vertical":
        return ConstraintSet(arrangement="vertical_line")
    if template == "two_row":
        return ConstraintSet(arrangement="rows", rows=2)
    if template == "staircase":
        return ConstraintSet(arrangement="diagonal_down")
    if template == "grid":
        r = max(2, int(math.sqrt(n)))
        c = -(-n // r)
        return ConstraintSet(arrangement="grid", rows=r, cols=c)
    if template == "emphasis_first":
        return ConstraintSet(
            arrangement="horizontal_line", emphasis_index=0, emphasis_role="largest"
        )
    raise TemplateIncompatibleError(f"unknown template: {template!r}")


def _jitter_layout(
    layout: Layout,
    cs: ConstraintSet,
    rng: random.Random,
    amount: float = 0.01,
) -> Layout:
    """Shift boxes by up to `amount`, keeping disjointness and the constraint."""
    boxes = list(layout)
    for i, b in enumerate(boxes):
        dx = rng.uniform(-amount, amount)
        dy = rng.uniform(-amount, amount)
        left = min(max(b.left + dx, 0.0), 1.0 - b.width)
        top = min(max(b.top + dy, 0.0), 1.0 - b.height)
        cand = NormBox(left, top, min(left + b.width, 1.0), min(top + b.height, 1.0))
        trial = list(boxes)
        trial[i] = cand
        overlapping = any(
            boxes_intersect(cand, other) for j, other in enumerate(trial) if j != i
        )
        if not overlapping and check_constraint(tuple(trial), cs).satisfied:
            boxes[i] = cand
    return tuple(boxes)


def generate_template_layout(
    template: str,
    glyphs: tuple[GlyphElement, ...],
    rng: random.Random,
    canvas_w: int = SYNTH_CANVAS,
    canvas_h: int = SYNTH_CANVAS,
) -> tuple[Layout, ConstraintSet, tuple[tuple[str, ...], str]]:
    """A named template arrangement with jittered gaps.

    Returns (layout, constraint set, (per-glyph details, overall
    description)). The layout is guaranteed disjoint and satisfies its
    own constraint set. Raises TemplateIncompatibleError when the glyph
    count does not fit the template.
    """
    n = len(glyphs)
    cs = _template_constraint(template, n)
    if template in ("two_row", "emphasis_first") and n < 2:
        raise TemplateIncompatibleError(f"{template} needs at least 2 glyphs")
    layout = seed_layout(cs, glyphs, canvas_w, canvas_h)
    layout = _jitter_layout(layout, cs, rng)

    for i, a in enumerate(layout):
        for b in layout[i + 1:]:
            if boxes_intersect(a, b):
                raise TemplateIncompatibleError(
                    f"template {template!r} produced overlapping boxes for {n} glyphs"
                )
    if not check_constraint(layout, cs).satisfied:
        raise TemplateIncompatibleError(
            f"template {template!r} failed its own constraint for {n} glyphs"
        )
    return layout, cs, describe_layout(layout, glyphs)


def _feasible_templates(n: int) -> list[str]:
    names = ["horizontal", "vertical", "staircase"]
    if n >= 2:
        names.append("two_row")
        names.append("emphasis_first")
    if n >= 4:
        names.append("grid")
    return names


def _pixel_exact_repack(
    glyphs: list[GlyphRaster],
    layout: Layout,
    canvas: int,
) -> tuple[list[GlyphRaster], Layout]:
    """Snap boxes to the pixel grid and tight-crop masks to match.

    Each glyph is resampled into its template box, tight-cropped, and
    re-centered; the stored box then has integer-pixel corners and
    exactly the stored mask's aspect ratio.
    """
    out_glyphs = []
    out_boxes = []
    for g, box in zip(glyphs, layout):
        px = to_pixel_box(box, canvas, canvas)
        placed = resample_binary(g.tight_content(), px.height, px.width)
        ys, xs = np.nonzero(placed)
        y0, y1 = int(ys.min()), int(ys.max()) + 1
        x0, x1 = int(xs.min()), int(xs.max()) + 1
        tight = placed[y0:y1, x0:x1]
        th, tw = tight.shape
        left = px.left + x0
        top = px.top + y0
        out_glyphs.append(GlyphRaster(tight))
        out_boxes.append(NormBox(
            left / canvas, top / canvas, (left + tw) / canvas, (top + th) / canvas
        ))
    return out_glyphs, tuple(out_boxes)


def _build_sample(seed: int, index: int, out_root: Path) -> SampleInfo:
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    n = rng.randint(2, 12)
    text = "".join(rng.choice(string.ascii_uppercase) for _ in range(n))

    glyphs = []
    for k in range(n):
        gseed = int.from_bytes(
            hashlib.sha256(f"{seed}:{index}:{k}".encode()).digest()[:8], "big"
        )
        raster = pseudo_glyph(gseed, rng.randint(1, 8))
        glyphs.append(GlyphElement(char=text[k], raster=raster, index=k))
    glyph_tuple = tuple(glyphs)

    template = rng.choice(_feasible_templates(n))
    layout, cs, _ = generate_template_layout(template, glyph_tuple, rng)

    rasters, layout = _pixel_exact_repack([g.raster for g in glyphs], layout, SYNTH_CANVAS)
    glyph_tuple = tuple(
        GlyphElement(char=text[k], raster=rasters[k], index=k) for k in range(n)
    )
    if not check_constraint(layout, cs).satisfied:
        raise RuntimeError(f"sample {index}: repack broke its constraint")
    details, overall = describe_layout(layout, glyph_tuple)

    sample_id = f"{index:05d}"
    sample_dir = out_root / sample_id
    sample_dir.mkdir(parents=True, exist_ok=True)
    mask_paths = []
    for k, g in enumerate(glyph_tuple):
        rel = f"{sample_id}/glyph_{k}.png"
        img = Image.fromarray(g.raster.mask * np.uint8(255), mode="L")
        img.save(out_root / rel)
        mask_paths.append(rel)

    constraint_text = render_constraint(cs)
    record = record_from_layout(list(text), layout, details=list(details))
    ann = Annotation(
        canvas_w=SYNTH_CANVAS,
        canvas_h=SYNTH_CANVAS,
        text=text,
        record=record,
        description=overall,
        constraint_text=constraint_text,
    )
    ann_rel = f"{sample_id}/annotation.json"
    (out_root / ann_rel).write_text(annotation_to_json(ann), encoding="utf-8")

    return SampleInfo(
        sample_id=sample_id,
        text=text,
        canvas_w=SYNTH_CANVAS,
        canvas_h=SYNTH_CANVAS,
        glyph_mask_paths=tuple(mask_paths),
        annotation_path=ann_rel,
        description=overall,
        constraint_text=constraint_text,
    )


def synthesize_dataset(
    count: int,
    seed: int,
    out_root: str | Path,
    workers: int | None = None,
) -> DatasetManifest:
    """Write a synthetic dataset; fully deterministic from (count, seed).

    Per-sample randomness is derived by hashing (seed, index), so worker
    parallelism never changes any output byte. Returns the manifest that
    was written to out_root/manifest.json.
    """
    if count <= 0:
        raise ValueError("count must be positive")
    root = Path(out_root)
    root.mkdir(parents=True, exist_ok=True)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(
                lambda i: _build_sample(seed, i, root), range(count)
            ))
    else:
        samples = [_build_sample(seed, i, root) for i in range(count)]

    manifest = DatasetManifest(samples=tuple(samples))
    (root / "manifest.json").write_text(manifest_to_json(manifest), encoding="utf-8")
    return manifest


def _component_boxes(labels: np.ndarray) -> list[tuple[int, int, int, int]]:
    """Half-open (y0, x0, y1, x1) tight boxes per label, 1-based labels."""
    boxes = []
    for sl in ndimage.find_objects(labels):
        boxes.append((sl[0].start, sl[1].start, sl[0].stop, sl[1].stop))
    return boxes


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _should_merge(a: tuple[int, int, int, int], b: tuple[int, int, int, int],
                  width: int) -> bool:
    ay0, ax0, ay1, ax1 = a
    by0, bx0, by1, bx1 = b
    gap = max(bx0 - ax1, ax0 - bx1, 0)
    if gap >= _MERGE_GAP_FRACTION * width:
        return False
    overlap = min(ay1, by1) - max(ay0, by0)
    return overlap > _MERGE_OVERLAP_FRACTION * min(ay1 - ay0, by1 - by0)


def ingest_rgba(image, text: str) -> LogoInstance:
    """Segment an RGBA image into per-glyph masks with ground-truth boxes.

    Foreground is alpha >= 128. 8-connected components are merged when
    nearly touching horizontally with strong vertical overlap (split
    strokes of one glyph), then ordered by reading order. The component
    count must equal len(text); mismatches raise GlyphCountMismatchError
    so the sample can be fixed by hand rather than silently dropped.
    """
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 4:
        raise NoAlphaChannelError("image must be RGBA with an alpha channel")
    height, width = arr.shape[:2]
    fg = arr[:, :, 3] >= 128

    labels, count = ndimage.label(fg, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        raise GlyphCountMismatchError(f"0 components for text of length {len(text)}")

    boxes = _component_boxes(labels)
    label_sets = [{i + 1} for i in range(count)]
    # Merge to a fixpoint: merging changes group boxes, which can put
    # further pairs under the thresholds.
    while True:
        uf = _UnionFind(len(boxes))
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if _should_merge(boxes[i], boxes[j], width):
                    uf.union(i, j)
        roots = sorted({uf.find(i) for i in range(len(boxes))})
        if len(roots) == len(boxes):
            break
        merged_boxes = []
        merged_sets = []
        for r in roots:
            members = [i for i in range(len(boxes)) if uf.find(i) == r]
            ys0, xs0, ys1, xs1 = zip(*(boxes[i] for i in members))
            merged_boxes.append((min(ys0), min(xs0), max(ys1), max(xs1)))
            merged_sets.append(set().union(*(label_sets[i] for i in members)))
        boxes = merged_boxes
        label_sets = merged_sets

    if len(boxes) != len(text):
        raise GlyphCountMismatchError(
            f"{len(boxes)} components for text of length {len(text)}"
        )

    centers_y = [(b[0] + b[2]) / 2.0 for b in boxes]
    order = _reading_order(boxes, centers_y, height)

    glyphs = []
    gt_boxes = []
    for k, idx in enumerate(order):
        y0, x0, y1, x1 = boxes[idx]
        mask = np.isin(labels[y0:y1, x0:x1], list(label_sets[idx])).astype(np.uint8)
        glyphs.append(GlyphElement(char=text[k], raster=GlyphRaster(mask), index=k))
        gt_boxes.append(NormBox(x0 / width, y0 / height, x1 / width, y1 / height))

    return LogoInstance(
        text=text,
        glyphs=tuple(glyphs),
        canvas_w=width,
        canvas_h=height,
        layout=tuple(gt_boxes),
    )


def _reading_order(boxes, centers_y: list[float], height: int) -> list[int]:
    """Row clustering by center-y, rows top to bottom, x-ascending within."""
    order = sorted(range(len(boxes)), key=lambda i: centers_y[i])
    rows: list[list[int]] = []
    for i in order:
        if rows and centers_y[i] - centers_y[rows[-1][-1]] <= _ROW_SPLIT_FRACTION * height:
            rows[-1].append(i)
        else:
            rows.append([i])
    result = []
    for row in rows:
        result.extend(sorted(row, key=lambda i: boxes[i][1]))
    return result
