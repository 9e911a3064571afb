import numpy as np
import pytest

from glyphforge.core import GlyphElement, GlyphRaster, LogoInstance


def solid(h, w):
    return GlyphRaster(np.ones((h, w), dtype=np.uint8))


def make_instance(shapes, canvas_w=1000, canvas_h=1000, text=None):
    """LogoInstance with solid rectangular glyphs of the given (h, w) shapes."""
    if text is None:
        letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        text = "".join(letters[i % len(letters)] for i in range(len(shapes)))
    glyphs = tuple(
        GlyphElement(char=text[i], raster=solid(h, w), index=i)
        for i, (h, w) in enumerate(shapes)
    )
    return LogoInstance(text=text, glyphs=glyphs, canvas_w=canvas_w, canvas_h=canvas_h)


@pytest.fixture
def four_square_instance():
    return make_instance([(40, 40)] * 4)
