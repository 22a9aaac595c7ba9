"""Cell-grid field model and the cutting blade.

The world is a regular grid of square cells over the bounding box of
the configured boundaries (plus a margin of headland).  Each cell is
uncut crop, cut residue (stubble and dropped straw), bare soil, or
ground outside any field.  The blade converts uncut cells it sweeps
over into residue; nothing ever converts back, which is what makes
coverage a clean monotone metric.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..geofence import FieldBoundary, contains


class CellState(enum.IntEnum):
    OUT_OF_FIELD = 0
    BARE_SOIL = 1
    UNCUT = 2
    CUT_RESIDUE = 3


@dataclass
class FieldState:
    """Mutable world state.

    cells is indexed [iy, ix]; cell (ix, iy) spans
    [origin + i*cell_size, origin + (i+1)*cell_size) in world meters.
    main_cells marks cells of the mission field (the neighbor field,
    when present, renders but does not count toward coverage).
    """

    boundary: FieldBoundary
    cell_size: float
    origin: np.ndarray
    cells: np.ndarray
    main_cells: np.ndarray
    blade_width: float
    crop_height: float = 0.9
    residue_height: float = 0.12
    texture_seed: int = 0
    gap: float | None = None
    initial_uncut: int = 0

    def cell_index(self, x, y):
        ix = np.floor((np.asarray(x) - self.origin[0]) / self.cell_size).astype(np.int64)
        iy = np.floor((np.asarray(y) - self.origin[1]) / self.cell_size).astype(np.int64)
        return ix, iy

    def uncut_count(self) -> int:
        return int(((self.cells == CellState.UNCUT) & self.main_cells).sum())

    def coverage(self) -> float:
        if self.initial_uncut == 0:
            return 0.0
        cut = int(((self.cells == CellState.CUT_RESIDUE) & self.main_cells).sum())
        return cut / self.initial_uncut

    def uncut_span(self) -> float:
        """Smaller side of the bounding box of remaining uncut main-field
        cells, in meters; 0 when nothing is left."""
        rows, cols = np.nonzero((self.cells == CellState.UNCUT) & self.main_cells)
        if rows.size == 0:
            return 0.0
        h = (rows.max() - rows.min() + 1) * self.cell_size
        w = (cols.max() - cols.min() + 1) * self.cell_size
        return float(min(h, w))


def _fill_inside(bits: np.ndarray, boundary: FieldBoundary, origin, cell_size: float) -> None:
    """Mark cells whose center lies inside the boundary."""
    ny, nx = bits.shape
    cx = origin[0] + (np.arange(nx) + 0.5) * cell_size
    cy = origin[1] + (np.arange(ny) + 0.5) * cell_size
    # Fields are small polygons; test row by row against the x-range first.
    xmin, ymin = boundary.vertices.min(axis=0)
    xmax, ymax = boundary.vertices.max(axis=0)
    for iy in range(ny):
        if not (ymin - cell_size <= cy[iy] <= ymax + cell_size):
            continue
        for ix in range(nx):
            if xmin <= cx[ix] <= xmax and contains(boundary, (cx[ix], cy[iy])):
                bits[iy, ix] = True


def build_field(
    boundary: FieldBoundary,
    cell_size: float = 0.25,
    blade_width: float = 1.0,
    crop_height: float = 0.9,
    residue_height: float = 0.12,
    texture_seed: int = 0,
    neighbor: FieldBoundary | None = None,
    gap: float | None = None,
    margin: float = 3.0,
) -> FieldState:
    """Grow a fully uncut field (and optional uncut neighbor) on a grid."""
    if cell_size <= 0.0:
        raise ValueError("cell_size must be positive")
    if blade_width <= 0.0:
        raise ValueError("blade_width must be positive")
    if neighbor is not None and (gap is None or gap <= 0.0):
        raise ValueError("a neighbor field requires a positive gap")

    pts = [boundary.vertices]
    if neighbor is not None:
        pts.append(neighbor.vertices)
    allv = np.vstack(pts)
    lo = allv.min(axis=0) - margin
    hi = allv.max(axis=0) + margin
    origin = np.floor(lo / cell_size) * cell_size
    nx = int(math.ceil((hi[0] - origin[0]) / cell_size))
    ny = int(math.ceil((hi[1] - origin[1]) / cell_size))

    cells = np.full((ny, nx), int(CellState.OUT_OF_FIELD), dtype=np.int8)
    main = np.zeros((ny, nx), dtype=bool)
    _fill_inside(main, boundary, origin, cell_size)
    cells[main] = int(CellState.UNCUT)
    if neighbor is not None:
        nb = np.zeros((ny, nx), dtype=bool)
        _fill_inside(nb, neighbor, origin, cell_size)
        cells[nb & ~main] = int(CellState.UNCUT)

    return FieldState(
        boundary=boundary,
        cell_size=cell_size,
        origin=origin,
        cells=cells,
        main_cells=main,
        blade_width=blade_width,
        crop_height=crop_height,
        residue_height=residue_height,
        texture_seed=texture_seed,
        gap=gap,
        initial_uncut=int(main.sum()),
    )


def apply_blade(
    field: FieldState,
    x: float,
    y: float,
    heading: float,
    blade_on: bool,
    blade_forward: float = 0.0,
    blade_right: float = 0.0,
) -> FieldState:
    """Cut the strip under the blade at the given pose (in place).

    The cutter bar is blade_width wide and lies perpendicular to the
    heading, its center blade_forward meters ahead of the reference
    point and blade_right meters to the vehicle's right (a side-mounted
    bar; zero means centered on the axis).  Only UNCUT cells change
    state, so repeated passes are idempotent and cells outside the
    sweep are untouched.  Returns the same field for call-chaining.
    """
    if not blade_on:
        return field
    ch, sh = math.cos(heading), math.sin(heading)
    # Rightward unit vector; heading is CCW-positive from +x.
    rx, ry = sh, -ch
    cx = x + blade_forward * ch + blade_right * rx
    cy = y + blade_forward * sh + blade_right * ry
    half = field.blade_width / 2.0
    n = max(2, int(math.ceil(field.blade_width / (field.cell_size / 2.0))) + 1)
    t = np.linspace(-half, half, n)
    px = cx + t * rx
    py = cy + t * ry
    ix, iy = field.cell_index(px, py)
    ok = (ix >= 0) & (ix < field.cells.shape[1]) & (iy >= 0) & (iy < field.cells.shape[0])
    ix, iy = ix[ok], iy[ok]
    hit = field.cells[iy, ix] == CellState.UNCUT
    field.cells[iy[hit], ix[hit]] = int(CellState.CUT_RESIDUE)
    return field
