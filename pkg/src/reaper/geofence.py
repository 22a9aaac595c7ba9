"""GPS boundary handling: polygon fence, inward inset, and noisy fixes.

Field corners are surveyed once (walked with a receiver) and entered
in the mission file either as local planar meters or as (lat, lon)
degrees; lat/lon is flattened with an equirectangular projection
anchored at the first corner, which is accurate to well under the GPS
noise floor at field scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_M = 6371000.0


class GeofenceError(ValueError):
    """Raised for degenerate boundaries (too few corners, repeats,
    self-intersection, non-convex inset requests, collapsed insets)."""


@dataclass(frozen=True)
class FieldBoundary:
    """Simple polygon in local planar meters, vertices in CCW order."""

    vertices: np.ndarray

    def __post_init__(self):
        v = self.vertices
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeofenceError("boundary needs at least 3 (x, y) vertices")

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class GpsModel:
    """Per-axis Gaussian fix noise, seeded for replayable missions.

    sigma = 0 degenerates to exact fixes, handy for debugging runs.
    """

    sigma: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise GeofenceError("gps sigma must be non-negative")


def _segments_properly_intersect(p1, p2, p3, p4) -> bool:
    """True when segment p1p2 intersects p3p4 anywhere (touching counts)."""

    def orient(a, b, c):
        d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(d) < 1e-12:
            return 0
        return 1 if d > 0 else -1

    def on_seg(a, b, c):
        return (
            min(a[0], b[0]) - 1e-12 <= c[0] <= max(a[0], b[0]) + 1e-12
            and min(a[1], b[1]) - 1e-12 <= c[1] <= max(a[1], b[1]) + 1e-12
        )

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_seg(p1, p2, p3):
        return True
    if o2 == 0 and on_seg(p1, p2, p4):
        return True
    if o3 == 0 and on_seg(p3, p4, p1):
        return True
    if o4 == 0 and on_seg(p3, p4, p2):
        return True
    return False


def local_from_latlon(corners: np.ndarray) -> np.ndarray:
    """Flatten (lat, lon) degree pairs to local meters about the first corner."""
    corners = np.asarray(corners, dtype=np.float64)
    lat0, lon0 = corners[0]
    lat0_rad = math.radians(lat0)
    x = np.radians(corners[:, 1] - lon0) * math.cos(lat0_rad) * EARTH_RADIUS_M
    y = np.radians(corners[:, 0] - lat0) * EARTH_RADIUS_M
    return np.column_stack([x, y])


def boundary_from_corners(corners) -> FieldBoundary:
    """Validate surveyed corners and normalize them to CCW order.

    Rejects fewer than 3 corners, repeated consecutive corners,
    self-intersecting outlines, and zero-area outlines.
    """
    v = np.asarray(corners, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise GeofenceError("boundary needs at least 3 (x, y) corners")
    nxt = np.roll(v, -1, axis=0)
    if np.any(np.all(np.isclose(v, nxt, atol=1e-12), axis=1)):
        raise GeofenceError("repeated consecutive corners")

    n = v.shape[0]
    for i in range(n):
        a1, a2 = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share an endpoint by design
            b1, b2 = v[j], v[(j + 1) % n]
            if _segments_properly_intersect(a1, a2, b1, b2):
                raise GeofenceError("boundary outline crosses itself")

    boundary = FieldBoundary(v)
    area = boundary.signed_area()
    if abs(area) < 1e-9:
        raise GeofenceError("boundary encloses no area")
    if area < 0:
        boundary = FieldBoundary(v[::-1].copy())
    return boundary


def _convex_or_raise(b: FieldBoundary) -> None:
    v = b.vertices
    prev = v - np.roll(v, 1, axis=0)
    nxt = np.roll(v, -1, axis=0) - v
    cross = prev[:, 0] * nxt[:, 1] - prev[:, 1] * nxt[:, 0]
    if np.any(cross <= 1e-12):
        raise GeofenceError("inset requires a strictly convex boundary")


def inset(boundary: FieldBoundary, d: float) -> FieldBoundary:
    """Shrink a convex boundary inward by distance d (edge-normal offset).

    Each edge line moves d toward the interior and adjacent offset
    lines are re-intersected.  A d large enough to empty the polygon
    raises GeofenceError rather than returning garbage.
    """
    if d < 0.0:
        raise GeofenceError("inset distance must be non-negative")
    _convex_or_raise(boundary)
    v = boundary.vertices
    n = v.shape[0]
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    # CCW interior lies left of each directed edge.
    normals = np.column_stack([-edges[:, 1], edges[:, 0]]) / lengths[:, None]
    anchors = v + d * normals  # a point on each offset line

    out = np.empty_like(v)
    for i in range(n):
        j = (i - 1) % n
        # Intersect offset lines of edge j (into vertex i) and edge i.
        a1, d1 = anchors[j], edges[j]
        a2, d2 = anchors[i], edges[i]
        denom = d1[0] * d2[1] - d1[1] * d2[0]
        if abs(denom) < 1e-12:
            raise GeofenceError("inset failed: adjacent edges are parallel")
        t = ((a2[0] - a1[0]) * d2[1] - (a2[1] - a1[1]) * d2[0]) / denom
        out[i] = a1 + t * d1

    shrunk = FieldBoundary(out)
    if shrunk.signed_area() < 1e-9:
        raise GeofenceError(f"inset by {d} collapses the boundary")
    try:
        _convex_or_raise(shrunk)
    except GeofenceError:
        raise GeofenceError(f"inset by {d} collapses the boundary") from None
    return shrunk


def contains(boundary: FieldBoundary, point) -> bool:
    """Point-in-polygon by ray casting; points on an edge count inside."""
    x, y = float(point[0]), float(point[1])
    v = boundary.vertices
    n = v.shape[0]
    scale = max(1.0, float(np.abs(v).max()))
    eps = 1e-9 * scale

    inside = False
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if (
            abs(cross) <= eps * max(1.0, math.hypot(x2 - x1, y2 - y1))
            and min(x1, x2) - eps <= x <= max(x1, x2) + eps
            and min(y1, y2) - eps <= y <= max(y1, y2) + eps
        ):
            return True  # on the fence line is still legal ground
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def gps_fix(true_position, model: GpsModel, tick: int) -> np.ndarray:
    """Noisy fix for one control tick.

    The noise stream is keyed by (seed, tick) rather than drawn from a
    shared stateful generator, so replaying any tick reproduces the
    same fix bit for bit regardless of call order.
    """
    if tick < 0:
        raise ValueError("tick must be non-negative")
    p = np.asarray(true_position, dtype=np.float64)
    if model.sigma == 0.0:
        return p.copy()
    rng = np.random.default_rng([int(model.seed), int(tick)])
    return p + rng.normal(0.0, model.sigma, size=2)
