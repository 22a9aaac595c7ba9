"""Per-frame navigation cues from the standing-crop mask.

Two cues steer the harvest: the crop height line l_height (a row
quantile marking the top of the standing crop ahead; with the camera
mounted below head height, nearer crop appears higher in the frame, so
a sudden drop of the line means the crop ahead has ended) and the outer
edge column e_outer (the cut/uncut boundary being followed).  Both are
compared against references frozen on the first frame, when the blade
has been aligned with the crop edge by the operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imaging import Mask


@dataclass(frozen=True)
class NavCueState:
    """First-frame references plus the fractions that produced them.

    l_reference is the initial crop height line (row index).  o_map is
    the image column where the crop edge sits when the vehicle is on
    its offset track; deviation from it maps directly to steering.
    """

    l_reference: int
    o_map: float
    height_fraction: float = 0.8
    eof_tolerance_fraction: float = 0.03
    edge_rows_fraction: float = 0.5


@dataclass(frozen=True)
class FrameCues:
    """Cues for one frame.  l_height and e_outer are None when no crop
    (or no edge rows) is visible; deviation is present iff e_outer is."""

    l_height: int | None
    e_outer: float | None
    end_of_field: bool
    deviation: float | None


def crop_height_line(mask: Mask, height_fraction: float = 0.8) -> int | None:
    """Row r such that at least height_fraction of the crop pixels lie
    strictly below it, taking the lowest such line (largest r).

    Returns None for an empty mask.  If even the top row fails the
    test (all crop concentrated in row 0), the result clamps to 0.
    """
    if not (0.0 < height_fraction <= 1.0):
        raise ValueError("height_fraction must lie in (0, 1]")
    per_row = mask.bits.sum(axis=1)
    total = int(per_row.sum())
    if total == 0:
        return None
    needed = height_fraction * total
    below = total - np.cumsum(per_row)  # below[r] = true pixels in rows > r
    ok = np.flatnonzero(below >= needed)
    if ok.size == 0:
        return 0
    return int(ok[-1])


def outer_edge(mask: Mask, edge_rows_fraction: float = 0.5) -> float | None:
    """Median of per-row leftmost crop columns over the lower rows.

    Only the bottom edge_rows_fraction of the image votes, because
    rows near the vehicle carry the least perspective distortion.  The
    uncut crop is kept to the right of the tracked boundary, so its
    left edge is the cut/uncut line.  Returns None when those rows
    hold no crop.
    """
    if not (0.0 < edge_rows_fraction <= 1.0):
        raise ValueError("edge_rows_fraction must lie in (0, 1]")
    height = mask.height
    n = min(height, max(1, int(round(edge_rows_fraction * height))))
    band = mask.bits[height - n:, :]
    has = band.any(axis=1)
    if not has.any():
        return None
    first = np.argmax(band, axis=1)[has]
    return float(np.median(first))


def initialize_references(
    mask: Mask,
    height_fraction: float = 0.8,
    eof_tolerance_fraction: float = 0.03,
    edge_rows_fraction: float = 0.5,
) -> NavCueState:
    """Freeze l_reference and o_map from the first frame.

    The first frame must show crop; a crop-free start frame means the
    vehicle was not aligned and raises ValueError.
    """
    l_ref = crop_height_line(mask, height_fraction)
    o_map = outer_edge(mask, edge_rows_fraction)
    if l_ref is None or o_map is None:
        raise ValueError("first frame shows no standing crop; cannot initialize references")
    return NavCueState(
        l_reference=l_ref,
        o_map=o_map,
        height_fraction=height_fraction,
        eof_tolerance_fraction=eof_tolerance_fraction,
        edge_rows_fraction=edge_rows_fraction,
    )


def end_of_field(l_height: int | None, state: NavCueState, image_height: int) -> bool:
    """True when the crop height line fell out of its reference band.

    The band is ceil(eof_tolerance_fraction * image_height) rows below
    l_reference; a line below that, or no line at all, signals that
    the standing crop ahead has run out.
    """
    if l_height is None:
        return True
    band = math.ceil(state.eof_tolerance_fraction * image_height)
    return l_height > state.l_reference + band


def steering_deviation(e_outer: float, state: NavCueState) -> float:
    """Pixel offset of the crop edge from its mapped column: e_outer - o_map."""
    return e_outer - state.o_map


def extract_cues(mask: Mask, state: NavCueState) -> FrameCues:
    """Compute all per-frame cues against the frozen references."""
    l_h = crop_height_line(mask, state.height_fraction)
    e_o = outer_edge(mask, state.edge_rows_fraction)
    return FrameCues(
        l_height=l_h,
        e_outer=e_o,
        end_of_field=end_of_field(l_h, state, mask.height),
        deviation=None if e_o is None else steering_deviation(e_o, state),
    )
