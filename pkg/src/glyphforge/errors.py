"""Exception types shared across the package.

The CLI maps these onto exit codes: schema problems exit 5, dataset and
manifest problems exit 4, constraint text problems exit 3, and plain file
I/O failures (OSError) exit 2.
"""


class GlyphforgeError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(GlyphforgeError):
    """Base class for layout record schema problems."""


class MalformedJsonError(SchemaError):
    """Input text is not valid JSON at all."""


class SchemaViolationError(SchemaError):
    """JSON parsed but does not match the layout record schema."""


class WordMismatchError(SchemaError):
    """Record words disagree with the expected glyph text."""


class InvertedBoxError(SchemaError):
    """A box has left >= right or top >= bottom."""


class DatasetError(GlyphforgeError):
    """Base class for dataset layout-on-disk problems."""


class MissingFileError(DatasetError):
    """Manifest references a file that does not exist."""


class ManifestSchemaError(DatasetError):
    """manifest.json or annotation.json has the wrong shape."""


class MaskCountMismatchError(DatasetError):
    """Sample mask count disagrees with its text length."""


class UnrecognizedConstraintError(GlyphforgeError):
    """Constraint text contains a clause outside the grammar."""


class EmptySampleSetError(GlyphforgeError):
    """A rate was requested over zero samples."""


class LayoutLengthMismatchError(GlyphforgeError):
    """Layout box count differs from the instance glyph count."""


class EmptyLayoutError(GlyphforgeError):
    """A metric was requested for a layout with no boxes."""


class TemplateIncompatibleError(GlyphforgeError):
    """Template cannot host the requested glyph count."""


class NoAlphaChannelError(GlyphforgeError):
    """Image ingestion requires an alpha channel and found none."""


class GlyphCountMismatchError(GlyphforgeError):
    """Segmented component count differs from the given text length."""


class InvalidOutputShapeError(GlyphforgeError):
    """Requested pooling output exceeds the input grid."""


class ShapeMismatchError(GlyphforgeError):
    """Feature grids or projection matrices have incompatible shapes."""
