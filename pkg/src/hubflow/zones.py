"""Traffic zones and point location.

Zones are simple lon/lat polygons loaded from GeoJSON or built as a
synthetic rectangular grid.  Point location runs through a uniform-grid
index whose answers are required to match a brute-force scan exactly:
the grid only prunes candidates, the containment test itself is shared.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, replace
from typing import IO, Iterable, Sequence, Union

from .geometry import (
    Point,
    point_in_ring,
    point_on_segment,
    ring_bbox,
    ring_centroid,
    validate_ring,
)
from .probe import Trip

logger = logging.getLogger(__name__)

DEFAULT_GRID_BBOX = (113.80, 22.45, 114.60, 22.85)  # ~80 x 45 km city extent
DEFAULT_GRID_ROWS = 12
DEFAULT_GRID_COLS = 19  # 12 x 19 = 228 zones
DEFAULT_DISTRICTS = 6


class ZoneValidationError(ValueError):
    """Raised when a zone file fails structural validation."""


@dataclass(frozen=True)
class TrafficZone:
    zone_id: int
    name: str
    district: str
    ring: tuple[Point, ...]  # closed: first vertex repeated last

    @property
    def centroid(self) -> Point:
        return ring_centroid(self.ring)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return ring_bbox(self.ring)


@dataclass
class ZoneSet:
    """Zones with unique ids, sorted by zone_id. Coordinates are WGS84 degrees."""

    zones: list[TrafficZone]

    def __post_init__(self) -> None:
        self.zones = sorted(self.zones, key=lambda z: z.zone_id)
        seen: set[int] = set()
        for z in self.zones:
            if z.zone_id in seen:
                raise ZoneValidationError(f"duplicate zone_id {z.zone_id}")
            seen.add(z.zone_id)

    def __len__(self) -> int:
        return len(self.zones)

    def __iter__(self):
        return iter(self.zones)

    def ids(self) -> set[int]:
        return {z.zone_id for z in self.zones}

    def by_id(self, zone_id: int) -> TrafficZone:
        for z in self.zones:
            if z.zone_id == zone_id:
                return z
        raise KeyError(zone_id)

    def mean_latitude(self) -> float:
        if not self.zones:
            return 0.0
        return sum(z.centroid[1] for z in self.zones) / len(self.zones)


def _point_strictly_in_ring(p: Point, ring: Sequence[Point]) -> bool:
    if not point_in_ring(p, ring):
        return False
    return not any(
        point_on_segment(p, ring[i], ring[i + 1]) for i in range(len(ring) - 1)
    )


def _warn_on_overlaps(zones: Sequence[TrafficZone]) -> None:
    """Cheap interior-overlap screen: warn when a vertex or centroid of one
    zone falls strictly inside another. Shared edges do not trigger it."""
    boxes = [z.bbox for z in zones]
    reported = 0
    for i in range(len(zones)):
        for j in range(i + 1, len(zones)):
            a, b = boxes[i], boxes[j]
            if a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1]:
                continue
            zi, zj = zones[i], zones[j]
            probes_ij = list(zi.ring[:-1]) + [zi.centroid]
            probes_ji = list(zj.ring[:-1]) + [zj.centroid]
            if any(_point_strictly_in_ring(p, zj.ring) for p in probes_ij) or any(
                _point_strictly_in_ring(p, zi.ring) for p in probes_ji
            ):
                logger.warning(
                    "zones %d and %d overlap in their interiors",
                    zi.zone_id,
                    zj.zone_id,
                )
                reported += 1
                if reported >= 20:
                    logger.warning("further overlap warnings suppressed")
                    return


def load_zones(source: Union[str, os.PathLike, IO]) -> ZoneSet:
    """Load zones from a GeoJSON FeatureCollection of single-ring Polygons.

    Every feature needs integer ``zone_id``; ``name`` and ``district``
    default to generated values.  Open, self-intersecting, or holed rings
    fail validation with the zone named in the error.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    if doc.get("type") != "FeatureCollection":
        raise ZoneValidationError("not a FeatureCollection")
    zones = []
    for idx, feature in enumerate(doc.get("features", [])):
        props = feature.get("properties") or {}
        geom = feature.get("geometry") or {}
        label = f"feature {idx}"
        raw_id = props.get("zone_id")
        if isinstance(raw_id, bool) or not isinstance(raw_id, int):
            raise ZoneValidationError(f"{label}: missing or non-integer zone_id")
        label = f"zone {raw_id}"
        if geom.get("type") != "Polygon":
            raise ZoneValidationError(f"{label}: geometry must be Polygon")
        rings = geom.get("coordinates") or []
        if len(rings) != 1:
            raise ZoneValidationError(f"{label}: interior rings not supported")
        ring = tuple((float(x), float(y)) for x, y in rings[0])
        defects = validate_ring(ring)
        if defects:
            raise ZoneValidationError(f"{label}: " + "; ".join(defects))
        zones.append(
            TrafficZone(
                zone_id=raw_id,
                name=str(props.get("name", f"zone-{raw_id}")),
                district=str(props.get("district", "")),
                ring=ring,
            )
        )
    zone_set = ZoneSet(zones)
    _warn_on_overlaps(zone_set.zones)
    return zone_set


def zones_to_geojson(zone_set: ZoneSet) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {
                    "zone_id": z.zone_id,
                    "name": z.name,
                    "district": z.district,
                },
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[x, y] for x, y in z.ring]],
                },
            }
            for z in zone_set
        ],
    }


def save_zones_geojson(zone_set: ZoneSet, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(zones_to_geojson(zone_set), fh, indent=2, sort_keys=True)
        fh.write("\n")


def synthetic_zone_grid(
    bbox: tuple[float, float, float, float] = DEFAULT_GRID_BBOX,
    rows: int = DEFAULT_GRID_ROWS,
    cols: int = DEFAULT_GRID_COLS,
    districts: int = DEFAULT_DISTRICTS,
) -> ZoneSet:
    """Deterministic rectangular zone grid (default 12 x 19 = 228 zones).

    Stands in for real survey zone polygons: ids are 1-based row-major,
    districts cycle round-robin.
    """
    lon_min, lat_min, lon_max, lat_max = bbox
    if not (lon_max > lon_min and lat_max > lat_min):
        raise ValueError(f"degenerate bbox {bbox}")
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    dx = (lon_max - lon_min) / cols
    dy = (lat_max - lat_min) / rows
    zones = []
    for r in range(rows):
        for c in range(cols):
            zone_id = r * cols + c + 1
            x0 = lon_min + c * dx
            y0 = lat_min + r * dy
            x1 = lon_min + (c + 1) * dx
            y1 = lat_min + (r + 1) * dy
            ring = ((x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0))
            zones.append(
                TrafficZone(
                    zone_id=zone_id,
                    name=f"Z{zone_id:03d}",
                    district=f"district-{(zone_id - 1) % districts + 1}",
                    ring=ring,
                )
            )
    return ZoneSet(zones)


class ZoneIndex:
    """Uniform-grid accelerator for point location.

    Each cell lists the zones whose bounding box touches it; a query
    tests only those candidates with the shared containment predicate and
    resolves boundary ties to the lowest zone_id, exactly like a full scan.
    """

    def __init__(self, zone_set: ZoneSet, cells_per_axis: int | None = None) -> None:
        self.zone_set = zone_set
        zones = zone_set.zones
        if not zones:
            self._empty = True
            return
        self._empty = False
        boxes = [z.bbox for z in zones]
        self.lon_min = min(b[0] for b in boxes)
        self.lat_min = min(b[1] for b in boxes)
        self.lon_max = max(b[2] for b in boxes)
        self.lat_max = max(b[3] for b in boxes)
        if cells_per_axis is None:
            cells_per_axis = max(1, min(256, int(math.ceil(math.sqrt(2 * len(zones))))))
        self.nx = self.ny = cells_per_axis
        self._dx = (self.lon_max - self.lon_min) / self.nx or 1.0
        self._dy = (self.lat_max - self.lat_min) / self.ny or 1.0
        self._cells: list[list[TrafficZone]] = [[] for _ in range(self.nx * self.ny)]
        for z, box in zip(zones, boxes):
            ix0 = self._clamp_ix(box[0])
            ix1 = self._clamp_ix(box[2])
            iy0 = self._clamp_iy(box[1])
            iy1 = self._clamp_iy(box[3])
            for iy in range(iy0, iy1 + 1):
                for ix in range(ix0, ix1 + 1):
                    self._cells[iy * self.nx + ix].append(z)

    def _clamp_ix(self, lon: float) -> int:
        return min(self.nx - 1, max(0, int((lon - self.lon_min) / self._dx)))

    def _clamp_iy(self, lat: float) -> int:
        return min(self.ny - 1, max(0, int((lat - self.lat_min) / self._dy)))

    def locate(self, lon: float, lat: float) -> int | None:
        """Zone id containing the point, or None. Boundary points belong to
        every touching zone; the lowest id wins."""
        if self._empty:
            return None
        if not (self.lon_min <= lon <= self.lon_max and self.lat_min <= lat <= self.lat_max):
            return None
        cell = self._cells[self._clamp_iy(lat) * self.nx + self._clamp_ix(lon)]
        best: int | None = None
        for z in cell:
            if point_in_ring((lon, lat), z.ring):
                if best is None or z.zone_id < best:
                    best = z.zone_id
        return best


def build_index(zone_set: ZoneSet, cells_per_axis: int | None = None) -> ZoneIndex:
    return ZoneIndex(zone_set, cells_per_axis)


def locate(index: ZoneIndex, point: Point) -> int | None:
    return index.locate(point[0], point[1])


def assign_trip_zones(trips: Iterable[Trip], index: ZoneIndex) -> list[Trip]:
    """Return new trips with pickup/dropoff zones resolved (None if outside)."""
    out = []
    for trip in trips:
        out.append(
            replace(
                trip,
                pickup_zone=index.locate(*trip.pickup_point),
                dropoff_zone=index.locate(*trip.dropoff_point),
            )
        )
    return out
