"""Near-vertical line extraction from binary crop masks.

Standing stalks show up as long vertical streaks in a forward camera
frame, while cut straw lies in short or horizontal strokes.  Color
alone cannot tell them apart (straw keeps the crop hue), so the last
segmentation stage keeps only pixels that belong to sufficiently long,
roughly vertical runs.

The detector tolerates wind and mounting tilt by scanning a small set
of shear angles rather than a full line-parameter search: for each tilt
t the mask is sheared so that lines leaning by t become exactly
vertical, and per-column run lengths are read off directly.  The shear
origin is the image bottom row, so a stalk's root column is stable
across tilts and duplicate detections can be merged by column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imaging import Mask


@dataclass(frozen=True)
class TextureParams:
    """Detector controls.

    tilt_max_deg / tilt_step_deg define the scanned shear angles
    {-tilt_max, ..., +tilt_max}.  min_length is the shortest run (in
    rows) kept by filter_short_lines.  max_gap is the largest interior
    false gap bridged inside one run.
    """

    tilt_max_deg: float = 5.0
    tilt_step_deg: float = 1.0
    min_length: int = 168  # 35% of a 480-row frame
    max_gap: int = 1

    def __post_init__(self):
        if self.tilt_max_deg < 0.0:
            raise ValueError("tilt_max_deg must be non-negative")
        if self.tilt_step_deg <= 0.0:
            raise ValueError("tilt_step_deg must be positive")
        if self.tilt_max_deg >= 90.0:
            raise ValueError("tilt_max_deg must stay below 90 degrees")
        if self.min_length < 1:
            raise ValueError("min_length must be at least 1 row")
        if self.max_gap < 0:
            raise ValueError("max_gap must be non-negative")

    def tilts(self) -> list[float]:
        k = int(math.floor(self.tilt_max_deg / self.tilt_step_deg + 1e-9))
        return [i * self.tilt_step_deg for i in range(-k, k + 1)]


@dataclass(frozen=True)
class LineSegment:
    """One detected run.

    column is the x intercept at the image bottom row (it may fall
    outside the frame for tilted runs that exit the side).  Positive
    tilt leans the top of the run toward smaller columns.  Rows are
    inclusive, row_start <= row_end.
    """

    column: int
    tilt_deg: float
    row_start: int
    row_end: int

    def __post_init__(self):
        if self.row_start > self.row_end:
            raise ValueError("row_start must not exceed row_end")

    @property
    def length(self) -> int:
        return self.row_end - self.row_start + 1


def _row_shifts(height: int, rows: np.ndarray, tilt_deg: float) -> np.ndarray:
    """Horizontal shear shift per row: round((height-1-r) * tan(tilt))."""
    return np.rint((height - 1 - rows) * math.tan(math.radians(tilt_deg))).astype(np.int64)


def _runs_in_columns(sheared: np.ndarray, max_gap: int):
    """Maximal true runs per column of a (rows, cols) bool array.

    Interior false gaps of length <= max_gap are bridged; bridged runs
    still start and end on true pixels.  Returns (col, row_start,
    row_end) index arrays in (col, row_start) order.
    """
    nrows, ncols = sheared.shape
    padded = np.zeros((ncols, nrows + 2), dtype=np.int8)
    padded[:, 1:-1] = sheared.T
    flat = padded.ravel()
    d = np.diff(flat)
    starts = np.flatnonzero(d == 1) + 1
    ends = np.flatnonzero(d == -1)  # index of each run's last true pixel
    if starts.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty

    span = nrows + 2
    col = starts // span
    row_start = starts % span - 1
    row_end = ends % span - 1

    if max_gap > 0 and starts.size > 1:
        same_col = col[1:] == col[:-1]
        small_gap = (row_start[1:] - row_end[:-1] - 1) <= max_gap
        join = same_col & small_gap
        first = np.flatnonzero(np.concatenate(([True], ~join)))
        last = np.concatenate((first[1:] - 1, [col.size - 1]))
        col = col[first]
        row_start = row_start[first]
        row_end = row_end[last]
    return col, row_start, row_end


def detect_vertical_lines(mask: Mask, params: TextureParams) -> list[LineSegment]:
    """Find maximal near-vertical runs across the configured tilt range.

    Runs found at several tilts with the same bottom-row intercept and
    overlapping row spans are duplicates of one physical line; only the
    longest is kept (ties resolved by tilt scan order).  Output is
    sorted by (column, tilt, row_start).
    """
    bits = mask.bits
    rows_any = np.flatnonzero(bits.any(axis=1))
    if rows_any.size == 0:
        return []
    cols_any = np.flatnonzero(bits.any(axis=0))
    r0, r1 = int(rows_any[0]), int(rows_any[-1])
    c0, c1 = int(cols_any[0]), int(cols_any[-1])
    sub = bits[r0:r1 + 1, c0:c1 + 1]
    height = mask.height
    sub_h, sub_w = sub.shape
    rows_abs = np.arange(r0, r1 + 1)

    tilts = params.tilts()
    margin = int(math.ceil((height - 1) * math.tan(math.radians(params.tilt_max_deg)))) + 1

    all_col = []
    all_start = []
    all_end = []
    all_tilt_idx = []
    sheared = np.zeros((sub_h, sub_w + 2 * margin), dtype=bool)
    for t_idx, tilt in enumerate(tilts):
        shifts = _row_shifts(height, rows_abs, tilt) + margin
        sheared[:] = False
        for i in range(sub_h):
            s = int(shifts[i])
            sheared[i, s:s + sub_w] = sub[i]
        col, rs, re = _runs_in_columns(sheared, params.max_gap)
        if col.size:
            all_col.append(col - margin + c0)  # back to bottom-row intercepts
            all_start.append(rs + r0)
            all_end.append(re + r0)
            all_tilt_idx.append(np.full(col.size, t_idx, dtype=np.int64))

    if not all_col:
        return []
    col = np.concatenate(all_col)
    row_start = np.concatenate(all_start)
    row_end = np.concatenate(all_end)
    tilt_idx = np.concatenate(all_tilt_idx)
    length = row_end - row_start + 1

    # Cluster same-column overlapping intervals on a single axis, then
    # keep one segment per cluster.
    stride = np.int64(height + 1)
    key_start = (col - col.min()) * stride + row_start
    key_end = (col - col.min()) * stride + row_end
    order = np.lexsort((tilt_idx, row_start, key_start))
    ks, ke = key_start[order], key_end[order]
    running_end = np.maximum.accumulate(ke)
    new_cluster = np.concatenate(([True], ks[1:] > running_end[:-1]))
    cluster = np.cumsum(new_cluster) - 1

    pick_order = np.lexsort((row_start[order], tilt_idx[order], -length[order], cluster))
    _, first = np.unique(cluster[pick_order], return_index=True)
    chosen = order[pick_order[first]]

    segments = [
        LineSegment(
            column=int(col[i]),
            tilt_deg=float(tilts[tilt_idx[i]]),
            row_start=int(row_start[i]),
            row_end=int(row_end[i]),
        )
        for i in chosen
    ]
    segments.sort(key=lambda s: (s.column, s.tilt_deg, s.row_start))
    return segments


def filter_short_lines(segments: list[LineSegment], params: TextureParams) -> list[LineSegment]:
    """Drop runs shorter than min_length rows; order is preserved."""
    return [s for s in segments if s.length >= params.min_length]


def lines_to_mask(segments: list[LineSegment], height: int, width: int) -> Mask:
    """Rasterize segments back into a mask of the given shape.

    Each segment occupies, at row r, the column
    column - round((height-1-r) * tan(tilt)).  Pixels falling outside
    the frame are clipped, not errors.
    """
    bits = np.zeros((height, width), dtype=bool)
    for seg in segments:
        rows = np.arange(seg.row_start, seg.row_end + 1)
        cols = seg.column - _row_shifts(height, rows, seg.tilt_deg)
        ok = (cols >= 0) & (cols < width) & (rows >= 0) & (rows < height)
        bits[rows[ok], cols[ok]] = True
    return Mask(bits)
