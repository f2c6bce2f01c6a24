"""Planar geometry over lon/lat coordinates.

City-scale distances use an equirectangular projection anchored at a
reference latitude; containment tests are exact ray casts on the raw
coordinates with boundary points counting as inside.
"""

from __future__ import annotations

import math
from typing import Sequence

Point = tuple[float, float]  # (lon, lat) in degrees

EARTH_RADIUS_M = 6_371_008.8


def equirect_distance_m(a: Point, b: Point, ref_lat_deg: float) -> float:
    """Distance in metres between two lon/lat points.

    Equirectangular approximation: longitudes are scaled by the cosine of
    ``ref_lat_deg``, adequate at city scale where the latitude band is
    narrow.
    """
    kx = math.cos(math.radians(ref_lat_deg)) * EARTH_RADIUS_M
    dx = math.radians(b[0] - a[0]) * kx
    dy = math.radians(b[1] - a[1]) * EARTH_RADIUS_M
    return math.hypot(dx, dy)


def point_on_segment(p: Point, a: Point, b: Point) -> bool:
    """True when p lies on the closed segment a-b."""
    cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    if cross != 0.0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def point_in_ring(p: Point, ring: Sequence[Point]) -> bool:
    """Boundary-inclusive even-odd containment test.

    ``ring`` must be closed (first vertex repeated last).  Points on an
    edge or vertex count as inside.
    """
    x, y = p
    n = len(ring) - 1
    for i in range(n):
        if point_on_segment(p, ring[i], ring[i + 1]):
            return True
    inside = False
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        # Half-open vertical rule keeps vertex crossings unambiguous.
        if (y1 > y) != (y2 > y):
            x_int = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_int:
                inside = not inside
    return inside


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True when closed segments a-b and c-d share at least one point."""
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    if ((o1 > 0) != (o2 > 0) and o1 != 0 and o2 != 0) and (
        (o3 > 0) != (o4 > 0) and o3 != 0 and o4 != 0
    ):
        return True
    if o1 == 0 and point_on_segment(c, a, b):
        return True
    if o2 == 0 and point_on_segment(d, a, b):
        return True
    if o3 == 0 and point_on_segment(a, c, d):
        return True
    if o4 == 0 and point_on_segment(b, c, d):
        return True
    return False


def ring_signed_area(ring: Sequence[Point]) -> float:
    """Shoelace area; positive for counter-clockwise rings."""
    total = 0.0
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        total += x1 * y2 - x2 * y1
    return total / 2.0


def ring_centroid(ring: Sequence[Point]) -> Point:
    """Area-weighted centroid; degenerates to the vertex mean at zero area."""
    area = ring_signed_area(ring)
    if area == 0.0:
        xs = [v[0] for v in ring[:-1]]
        ys = [v[1] for v in ring[:-1]]
        return (sum(xs) / len(xs), sum(ys) / len(ys))
    cx = 0.0
    cy = 0.0
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        w = x1 * y2 - x2 * y1
        cx += (x1 + x2) * w
        cy += (y1 + y2) * w
    return (cx / (6.0 * area), cy / (6.0 * area))


def ring_bbox(ring: Sequence[Point]) -> tuple[float, float, float, float]:
    xs = [v[0] for v in ring]
    ys = [v[1] for v in ring]
    return (min(xs), min(ys), max(xs), max(ys))


def validate_ring(ring: Sequence[Point]) -> list[str]:
    """Return a list of defects; empty when the ring is a valid zone boundary.

    A valid ring is closed, has at least three distinct vertices, repeats
    no interior vertex, encloses nonzero area, and is simple (no two
    non-adjacent edges touch or cross).
    """
    defects: list[str] = []
    if len(ring) < 4:
        defects.append("fewer than 3 vertices")
        return defects
    if ring[0] != ring[-1]:
        defects.append("open ring (first vertex != last)")
        return defects
    body = list(ring[:-1])
    if len(set(body)) != len(body):
        defects.append("repeated vertex")
    if len(set(body)) < 3:
        defects.append("fewer than 3 distinct vertices")
    if ring_signed_area(ring) == 0.0:
        defects.append("zero area")
    if defects:
        return defects
    n = len(body)
    for i in range(n):
        a, b = ring[i], ring[i + 1]
        for j in range(i + 1, n):
            # Adjacent edges share exactly one vertex by construction.
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            c, d = ring[j], ring[j + 1]
            if segments_intersect(a, b, c, d):
                defects.append(f"edges {i} and {j} intersect")
                return defects
    return defects
