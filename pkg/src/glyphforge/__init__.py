"""Text-logo layout toolkit: generate, optimize, render, and score
glyph box layouts built from per-glyph binary masks.
"""

from .baselines import layout_rule_a, layout_rule_b
from .compositor import OccupancyMap, compose, place_glyph, render_array, render_png
from .constraints import (
    ConstraintCheck,
    ConstraintSet,
    check_constraint,
    parse_constraint,
    render_constraint,
    violation_ratio,
)
from .core import (
    GlyphElement,
    GlyphRaster,
    Layout,
    LogoInstance,
    NormBox,
    PixelBox,
    box_area,
    box_aspect_ratio,
    box_center,
    boxes_intersect,
    glyph_aspect_ratio,
    layout_from_boxes,
    normalize_glyph,
    to_pixel_box,
)
from .errors import (
    DatasetError,
    EmptyLayoutError,
    GlyphCountMismatchError,
    GlyphforgeError,
    InvertedBoxError,
    MalformedJsonError,
    ManifestSchemaError,
    MaskCountMismatchError,
    MissingFileError,
    NoAlphaChannelError,
    SchemaError,
    SchemaViolationError,
    TemplateIncompatibleError,
    UnrecognizedConstraintError,
    WordMismatchError,
)
from .featpipe import (
    FeatureGrid,
    adaptive_avg_pool,
    early_fusion,
    patch_features,
    zero_projection,
)
from .metrics import MetricReport, evaluate, overlap_iou, ratio_consistency, visual_balance
from .schema import (
    Annotation,
    DatasetManifest,
    LayoutEntry,
    LayoutRecord,
    SampleInfo,
    dataset_stats,
    load_dataset,
    parse_annotation,
    parse_layout_record,
    parse_manifest,
    record_from_layout,
    record_to_layout,
    serialize_layout_record,
)
from .solver import (
    EnergyTerms,
    SolveTrace,
    SolverConfig,
    describe_layout,
    energy,
    energy_breakdown,
    neighbor,
    seed_layout,
    solve,
)
from .synth import generate_template_layout, ingest_rgba, pseudo_glyph, synthesize_dataset

__version__ = "0.1.0"
