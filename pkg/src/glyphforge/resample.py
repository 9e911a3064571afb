"""Raster resampling primitives used by the compositor, solver, and synth.

Two resamplers live here. `resample_bilinear` is the contract resampler
for glyph placement: pixel centers of the output are mapped into the
source with the half-pixel convention and interpolated. `box_mean_resample`
computes exact per-cell source means through an integral image; it is the
cheap occupancy estimator the annealer uses on its reduced search grid.
"""

from __future__ import annotations

import numpy as np


def resample_bilinear(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resample a 2-D float array to (out_h, out_w) by bilinear interpolation.

    Output pixel centers are mapped to source coordinates with the
    half-pixel convention (x_src = (x + 0.5) * W / out_w - 0.5) and
    clamped at the borders, so a same-size resample is the identity.

    Args:
        src: 2-D array, any float or integer dtype.
        out_h: output height in pixels, >= 1.
        out_w: output width in pixels, >= 1.

    Returns:
        float64 array of shape (out_h, out_w).
    """
    if src.ndim != 2:
        raise ValueError("src must be 2-D")
    if out_h < 1 or out_w < 1:
        raise ValueError("output dims must be >= 1")
    src = np.asarray(src, dtype=np.float64)
    h, w = src.shape

    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * h / out_h - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * w / out_w - 0.5
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)

    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]

    top = src[np.ix_(y0, x0)] * (1.0 - fx) + src[np.ix_(y0, x1)] * fx
    bot = src[np.ix_(y1, x0)] * (1.0 - fx) + src[np.ix_(y1, x1)] * fx
    return top * (1.0 - fy) + bot * fy


def resample_binary(mask: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear-resample a binary mask and re-binarize at 0.5.

    Returns a uint8 array of 0/1. If thresholding would produce an empty
    mask (pathologically thin content at a harsh downscale), the single
    strongest pixel is kept so a nonempty mask never vanishes.
    """
    field = resample_bilinear(mask, out_h, out_w)
    out = (field >= 0.5).astype(np.uint8)
    if not out.any() and mask.any():
        idx = np.unravel_index(int(np.argmax(field)), field.shape)
        out[idx] = 1
    return out


def integral_image(mask: np.ndarray) -> np.ndarray:
    """Summed-area table with a zero row/column prepended.

    I[i, j] equals mask[:i, :j].sum(), so I has shape (H+1, W+1).
    """
    if mask.ndim != 2:
        raise ValueError("mask must be 2-D")
    ii = np.zeros((mask.shape[0] + 1, mask.shape[1] + 1), dtype=np.float64)
    np.cumsum(np.cumsum(mask, axis=0, dtype=np.float64), axis=1, out=ii[1:, 1:])
    return ii


def _sample_integral(ii: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Bilinear sample of an integral image at fractional boundaries.

    Because the integral of a piecewise-constant image is piecewise
    bilinear, interpolating the table gives exact region sums for
    fractional rectangles.
    """
    h = ii.shape[0] - 1
    w = ii.shape[1] - 1
    ys = np.clip(ys, 0.0, float(h))
    xs = np.clip(xs, 0.0, float(w))
    y0 = np.minimum(np.floor(ys).astype(np.intp), h - 1) if h > 0 else np.zeros(len(ys), np.intp)
    x0 = np.minimum(np.floor(xs).astype(np.intp), w - 1) if w > 0 else np.zeros(len(xs), np.intp)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    a = ii[np.ix_(y0, x0)]
    b = ii[np.ix_(y0, x0 + 1)]
    c = ii[np.ix_(y0 + 1, x0)]
    d = ii[np.ix_(y0 + 1, x0 + 1)]
    return a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx


def box_mean_resample(ii: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Mean source coverage per cell of an (out_h, out_w) partition.

    The source rectangle [0, H] x [0, W] is split into out_h * out_w equal
    cells; each output value is the exact mean of the source over its cell,
    computed from the integral image `ii` (as built by `integral_image`).
    """
    if out_h < 1 or out_w < 1:
        raise ValueError("output dims must be >= 1")
    h = ii.shape[0] - 1
    w = ii.shape[1] - 1
    ys = np.linspace(0.0, float(h), out_h + 1)
    xs = np.linspace(0.0, float(w), out_w + 1)
    s = _sample_integral(ii, ys, xs)
    sums = s[1:, 1:] - s[:-1, 1:] - s[1:, :-1] + s[:-1, :-1]
    cell_area = (h / out_h) * (w / out_w)
    return sums / cell_area
