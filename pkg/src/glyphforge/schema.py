"""Layout record JSON and the dataset directory format.

A layout record is a JSON array with one object per glyph, keys exactly
in the order word, detail, box:

    [{"word": "A", "detail": "...", "box": [0.4759, 0.0231, 0.5863, 0.3790]}]

Box coordinates are (left, top, right, bottom) canvas fractions rendered
with 4 decimal places; an unfilled entry carries box []. A dataset on disk
is a root directory holding manifest.json plus one subdirectory per
sample with glyph_<k>.png masks (8-bit grayscale, foreground >= 128),
annotation.json, and optionally render.png.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from .constraints import ConstraintSet, parse_constraint
from .core import GlyphElement, GlyphRaster, Layout, LogoInstance, NormBox
from .errors import (
    InvertedBoxError,
    MalformedJsonError,
    ManifestSchemaError,
    MaskCountMismatchError,
    MissingFileError,
    SchemaError,
    SchemaViolationError,
    WordMismatchError,
)


@dataclass(frozen=True)
class LayoutEntry:
    """One glyph's slot in a layout record."""

    word: str
    detail: str = ""
    box: NormBox | None = None


@dataclass(frozen=True)
class LayoutRecord:
    """Ordered layout entries plus a flag set when parsing clamped coords."""

    entries: tuple[LayoutEntry, ...]
    clamped: bool = False

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(e.word for e in self.entries)


def empty_record_for(text: str) -> LayoutRecord:
    """The unfilled record skeleton for a text: empty details and boxes."""
    if not text:
        raise ValueError("text must be nonempty")
    return LayoutRecord(entries=tuple(LayoutEntry(word=c) for c in text))


def record_from_layout(
    words: Sequence[str],
    layout: Layout,
    details: Sequence[str] | None = None,
) -> LayoutRecord:
    """Build a filled record from words, boxes, and optional details."""
    if len(words) != len(layout):
        raise ValueError("words and layout must have equal length")
    if details is None:
        details = [""] * len(words)
    if len(details) != len(words):
        raise ValueError("details must match words in length")
    entries = tuple(
        LayoutEntry(word=w, detail=d, box=b)
        for w, d, b in zip(words, details, layout)
    )
    return LayoutRecord(entries=entries)


def record_to_layout(record: LayoutRecord) -> Layout:
    """Extract the boxes of a fully filled record."""
    boxes = []
    for i, e in enumerate(record.entries):
        if e.box is None:
            raise SchemaViolationError(f"entry {i} has no box")
        boxes.append(e.box)
    return tuple(boxes)


def serialize_layout_record(record: LayoutRecord) -> str:
    """Render a record as single-line JSON with 4-decimal coordinates."""
    parts = []
    for e in record.entries:
        if e.box is None:
            box = "[]"
        else:
            box = "[" + ", ".join(f"{v:.4f}" for v in e.box.as_tuple()) + "]"
        parts.append(
            '{"word": %s, "detail": %s, "box": %s}'
            % (
                json.dumps(e.word, ensure_ascii=False),
                json.dumps(e.detail, ensure_ascii=False),
                box,
            )
        )
    return "[" + ", ".join(parts) + "]"


def parse_layout_record(
    text: str,
    expected_words: Sequence[str] | None = None,
) -> LayoutRecord:
    """Parse and validate layout record JSON.

    Coordinates outside [0, 1] are clamped and flagged on the returned
    record; a box given inverted, or lying entirely outside the canvas,
    raises InvertedBoxError. When expected_words is given the record's
    words must match it exactly, in order.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(f"not valid JSON: {exc}") from exc
    return record_from_json_obj(data, expected_words)


def record_from_json_obj(
    data: object,
    expected_words: Sequence[str] | None = None,
) -> LayoutRecord:
    """Validate an already-decoded JSON object as a layout record."""
    if not isinstance(data, list):
        raise SchemaViolationError("top level must be a JSON array")
    if not data:
        raise SchemaViolationError("record has no entries")
    if expected_words is not None and len(data) != len(expected_words):
        raise WordMismatchError(
            f"record has {len(data)} entries, expected {len(expected_words)}"
        )

    entries = []
    clamped = False
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise SchemaViolationError(f"entry {i} is not an object")
        if set(item.keys()) != {"word", "detail", "box"}:
            raise SchemaViolationError(
                f"entry {i} keys must be exactly word, detail, box"
            )
        word = item["word"]
        detail = item["detail"]
        raw = item["box"]
        if not isinstance(word, str) or not word:
            raise SchemaViolationError(f"entry {i} word must be a nonempty string")
        if not isinstance(detail, str):
            raise SchemaViolationError(f"entry {i} detail must be a string")
        if expected_words is not None and word != expected_words[i]:
            raise WordMismatchError(
                f"entry {i} word {word!r} does not match expected {expected_words[i]!r}"
            )
        if not isinstance(raw, list) or len(raw) not in (0, 4):
            raise SchemaViolationError(f"entry {i} box must be a list of 0 or 4 numbers")
        box = None
        if len(raw) == 4:
            if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw):
                raise SchemaViolationError(f"entry {i} box values must be numbers")
            left, top, right, bottom = (float(v) for v in raw)
            if left >= right or top >= bottom:
                raise InvertedBoxError(
                    f"entry {i} box is inverted: {raw}"
                )
            cl = [min(max(v, 0.0), 1.0) for v in (left, top, right, bottom)]
            if cl != [left, top, right, bottom]:
                clamped = True
            if cl[0] >= cl[2] or cl[1] >= cl[3]:
                raise InvertedBoxError(
                    f"entry {i} box lies outside the canvas: {raw}"
                )
            box = NormBox(*cl)
        entries.append(LayoutEntry(word=word, detail=detail, box=box))
    return LayoutRecord(entries=tuple(entries), clamped=clamped)


@dataclass(frozen=True)
class SampleInfo:
    """One manifest row describing a stored sample."""

    sample_id: str
    text: str
    canvas_w: int
    canvas_h: int
    glyph_mask_paths: tuple[str, ...]
    annotation_path: str
    description: str
    constraint_text: str | None = None


@dataclass(frozen=True)
class DatasetManifest:
    """All manifest rows of a dataset root."""

    samples: tuple[SampleInfo, ...]


@dataclass(frozen=True)
class Annotation:
    """Contents of one sample's annotation.json."""

    canvas_w: int
    canvas_h: int
    text: str
    record: LayoutRecord
    description: str
    constraint_text: str | None = None


def annotation_to_json(ann: Annotation) -> str:
    """Serialize an annotation, embedding the record in its line format."""
    parts = [
        f'"canvas": [{ann.canvas_w}, {ann.canvas_h}]',
        f'"text": {json.dumps(ann.text, ensure_ascii=False)}',
        f'"layout": {serialize_layout_record(ann.record)}',
        f'"description": {json.dumps(ann.description, ensure_ascii=False)}',
    ]
    if ann.constraint_text is not None:
        parts.append(f'"constraint": {json.dumps(ann.constraint_text, ensure_ascii=False)}')
    return "{" + ", ".join(parts) + "}"


def parse_annotation(text: str) -> Annotation:
    """Parse annotation.json content; shape problems are dataset errors."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestSchemaError(f"annotation is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ManifestSchemaError("annotation must be a JSON object")
    canvas = data.get("canvas")
    if (
        not isinstance(canvas, list)
        or len(canvas) != 2
        or not all(isinstance(v, int) and v > 0 for v in canvas)
    ):
        raise ManifestSchemaError("annotation canvas must be [width, height]")
    txt = data.get("text")
    if not isinstance(txt, str) or not txt:
        raise ManifestSchemaError("annotation text must be a nonempty string")
    description = data.get("description")
    if not isinstance(description, str):
        raise ManifestSchemaError("annotation description must be a string")
    constraint_text = data.get("constraint")
    if constraint_text is not None and not isinstance(constraint_text, str):
        raise ManifestSchemaError("annotation constraint must be a string")
    try:
        record = record_from_json_obj(data.get("layout"), expected_words=list(txt))
    except SchemaError as exc:
        raise ManifestSchemaError(f"annotation layout invalid: {exc}") from exc
    return Annotation(
        canvas_w=canvas[0],
        canvas_h=canvas[1],
        text=txt,
        record=record,
        description=description,
        constraint_text=constraint_text,
    )


def manifest_to_json(manifest: DatasetManifest) -> str:
    """Serialize a manifest deterministically (stable key order, 2-space)."""
    rows = []
    for s in manifest.samples:
        row: dict[str, object] = {
            "id": s.sample_id,
            "text": s.text,
            "canvas": [s.canvas_w, s.canvas_h],
            "glyph_mask_paths": list(s.glyph_mask_paths),
            "annotation_path": s.annotation_path,
            "description": s.description,
        }
        if s.constraint_text is not None:
            row["constraint_text"] = s.constraint_text
        rows.append(row)
    return json.dumps({"samples": rows}, ensure_ascii=False, indent=2)


def parse_manifest(text: str) -> DatasetManifest:
    """Parse manifest.json content."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestSchemaError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("samples"), list):
        raise ManifestSchemaError("manifest must be an object with a samples list")
    samples = []
    for i, row in enumerate(data["samples"]):
        if not isinstance(row, dict):
            raise ManifestSchemaError(f"manifest sample {i} is not an object")
        try:
            sid = row["id"]
            text_ = row["text"]
            canvas = row["canvas"]
            mask_paths = row["glyph_mask_paths"]
            ann_path = row["annotation_path"]
            description = row["description"]
        except KeyError as exc:
            raise ManifestSchemaError(f"manifest sample {i} missing key {exc}") from exc
        constraint_text = row.get("constraint_text")
        if (
            not isinstance(sid, str)
            or not isinstance(text_, str)
            or not text_
            or not isinstance(canvas, list)
            or len(canvas) != 2
            or not all(isinstance(v, int) and v > 0 for v in canvas)
            or not isinstance(mask_paths, list)
            or not all(isinstance(p, str) for p in mask_paths)
            or not isinstance(ann_path, str)
            or not isinstance(description, str)
            or (constraint_text is not None and not isinstance(constraint_text, str))
        ):
            raise ManifestSchemaError(f"manifest sample {i} has a malformed field")
        samples.append(SampleInfo(
            sample_id=sid,
            text=text_,
            canvas_w=canvas[0],
            canvas_h=canvas[1],
            glyph_mask_paths=tuple(mask_paths),
            annotation_path=ann_path,
            description=description,
            constraint_text=constraint_text,
        ))
    return DatasetManifest(samples=tuple(samples))


def load_mask_png(path: Path) -> GlyphRaster:
    """Load an 8-bit grayscale mask; foreground is any value >= 128."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    return GlyphRaster((arr >= 128).astype(np.uint8))


def load_dataset(root: str | Path) -> tuple[DatasetManifest, tuple[LogoInstance, ...]]:
    """Load a dataset root into memory.

    Validates that every referenced file exists, that mask counts match
    text lengths, and that annotations agree with the manifest. Returns
    the manifest plus one LogoInstance per sample with ground-truth layout
    and parsed constraint attached.
    """
    root = Path(root)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise MissingFileError(f"no manifest.json under {root}")
    manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"))

    instances = []
    for s in manifest.samples:
        if len(s.glyph_mask_paths) != len(s.text):
            raise MaskCountMismatchError(
                f"sample {s.sample_id}: {len(s.glyph_mask_paths)} masks for text {s.text!r}"
            )
        ann_file = root / s.annotation_path
        if not ann_file.is_file():
            raise MissingFileError(f"sample {s.sample_id}: missing {s.annotation_path}")
        ann = parse_annotation(ann_file.read_text(encoding="utf-8"))
        if ann.text != s.text or (ann.canvas_w, ann.canvas_h) != (s.canvas_w, s.canvas_h):
            raise ManifestSchemaError(
                f"sample {s.sample_id}: annotation disagrees with manifest"
            )
        glyphs = []
        for k, rel in enumerate(s.glyph_mask_paths):
            mask_file = root / rel
            if not mask_file.is_file():
                raise MissingFileError(f"sample {s.sample_id}: missing {rel}")
            glyphs.append(GlyphElement(char=s.text[k], raster=load_mask_png(mask_file), index=k))
        constraint: ConstraintSet | None = None
        text_src = ann.constraint_text if ann.constraint_text is not None else s.constraint_text
        if text_src:
            constraint = parse_constraint(text_src)
        try:
            gt_layout = record_to_layout(ann.record)
        except SchemaError as exc:
            raise ManifestSchemaError(
                f"sample {s.sample_id}: annotation layout incomplete: {exc}"
            ) from exc
        instances.append(LogoInstance(
            text=s.text,
            glyphs=tuple(glyphs),
            canvas_w=s.canvas_w,
            canvas_h=s.canvas_h,
            layout=gt_layout,
            constraint=constraint,
        ))
    return manifest, tuple(instances)


def dataset_stats(manifest: DatasetManifest) -> dict[str, float]:
    """Sample count, total glyph count, and mean glyphs per image."""
    n = len(manifest.samples)
    total = sum(len(s.text) for s in manifest.samples)
    return {
        "samples": n,
        "total_glyphs": total,
        "glyphs_per_image": (total / n) if n else 0.0,
    }
