"""Array-level building blocks of a feature token pipeline.

A glyph raster becomes a grid of handcrafted patch descriptors. Adaptive
average pooling shrinks a grid (a 24x24 input pooled to 4x4 cuts the
cell count by a factor of 6 squared). Early fusion adds a linearly
projected second grid onto a base grid. A zero projection makes fusion
the exact identity on the base, which is the safe starting point for
stacking a new signal onto a working one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GlyphRaster
from .errors import InvalidOutputShapeError, ShapeMismatchError

PATCH_FEATURE_DIM = 4


@dataclass(frozen=True)
class FeatureGrid:
    """A (rows, cols, dim) float64 array of per-cell feature vectors."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValueError("feature grid must be (rows, cols, dim) with all dims >= 1")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def dim(self) -> int:
        return int(self.data.shape[2])


def _cell_bounds(size: int, cells: int) -> list[tuple[int, int]]:
    """Equal partition of `size` into `cells` spans, remainder in the last."""
    base = size // cells
    bounds = [(k * base, (k + 1) * base) for k in range(cells)]
    bounds[-1] = ((cells - 1) * base, size)
    return bounds


def patch_features(g: GlyphRaster, grid: int) -> FeatureGrid:
    """Handcrafted 4-channel descriptors over a grid x grid partition.

    Channels per cell: mean intensity, horizontal edge density, vertical
    edge density, and foreground fill ratio. Edge density is the mean
    absolute difference between neighboring pixels along the axis,
    attributed to the cell of the left/top pixel of each pair. All values
    lie in [0, 1].
    """
    if grid < 1:
        raise ValueError("grid must be >= 1")
    if grid > min(g.height, g.width):
        raise ValueError(
            f"grid {grid} exceeds raster dims {g.width}x{g.height}"
        )
    mask = g.mask.astype(np.float64)
    dx = np.abs(np.diff(mask, axis=1))
    dy = np.abs(np.diff(mask, axis=0))

    out = np.zeros((grid, grid, PATCH_FEATURE_DIM), dtype=np.float64)
    row_bounds = _cell_bounds(g.height, grid)
    col_bounds = _cell_bounds(g.width, grid)
    for r, (y0, y1) in enumerate(row_bounds):
        for c, (x0, x1) in enumerate(col_bounds):
            cell = mask[y0:y1, x0:x1]
            cell_dx = dx[y0:y1, x0:min(x1, dx.shape[1])]
            cell_dy = dy[y0:min(y1, dy.shape[0]), x0:x1]
            out[r, c, 0] = cell.mean()
            out[r, c, 1] = cell_dx.mean() if cell_dx.size else 0.0
            out[r, c, 2] = cell_dy.mean() if cell_dy.size else 0.0
            out[r, c, 3] = np.count_nonzero(cell) / cell.size
    return FeatureGrid(out)


def adaptive_avg_pool(f: FeatureGrid, out_rows: int, out_cols: int) -> FeatureGrid:
    """Average-pool a grid to (out_rows, out_cols) per channel.

    Bin i spans input rows [floor(i * in / out), ceil((i + 1) * in / out)),
    so neighboring bins may share a row when the shapes do not divide.
    Output must not exceed input on either axis.
    """
    if out_rows < 1 or out_cols < 1:
        raise InvalidOutputShapeError("output dims must be >= 1")
    if out_rows > f.rows or out_cols > f.cols:
        raise InvalidOutputShapeError(
            f"cannot pool {f.rows}x{f.cols} up to {out_rows}x{out_cols}"
        )
    out = np.zeros((out_rows, out_cols, f.dim), dtype=np.float64)
    for i in range(out_rows):
        y0 = (i * f.rows) // out_rows
        y1 = -((-(i + 1) * f.rows) // out_rows)
        for j in range(out_cols):
            x0 = (j * f.cols) // out_cols
            x1 = -((-(j + 1) * f.cols) // out_cols)
            out[i, j] = f.data[y0:y1, x0:x1].mean(axis=(0, 1))
    return FeatureGrid(out)


def zero_projection(early_dim: int, base_dim: int) -> np.ndarray:
    """The all-zero (early_dim, base_dim) projection: fusion's identity init."""
    if early_dim < 1 or base_dim < 1:
        raise ValueError("projection dims must be >= 1")
    return np.zeros((early_dim, base_dim), dtype=np.float64)


def early_fusion(base: FeatureGrid, early: FeatureGrid, proj: np.ndarray) -> FeatureGrid:
    """Add a projected early grid onto a base grid, cell by cell.

    proj maps early feature vectors (dim early.dim) into the base feature
    space (dim base.dim); the grids must agree on rows and cols.
    """
    if (base.rows, base.cols) != (early.rows, early.cols):
        raise ShapeMismatchError(
            f"grid shapes differ: {base.rows}x{base.cols} vs {early.rows}x{early.cols}"
        )
    proj = np.asarray(proj, dtype=np.float64)
    if proj.shape != (early.dim, base.dim):
        raise ShapeMismatchError(
            f"projection must be ({early.dim}, {base.dim}), got {proj.shape}"
        )
    return FeatureGrid(base.data + early.data @ proj)
