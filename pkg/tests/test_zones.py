"""Zone loading and spatial index tests.

The grid index is required to agree exactly with a brute-force scan over
every zone, including points on shared edges and vertices where the
lowest-zone-id tie-break applies.
"""

from __future__ import annotations

import io
import json
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubflow.geometry import point_in_ring
from hubflow.probe import Trip
from hubflow.zones import (
    DEFAULT_GRID_BBOX,
    DEFAULT_GRID_COLS,
    DEFAULT_GRID_ROWS,
    TrafficZone,
    ZoneIndex,
    ZoneSet,
    ZoneValidationError,
    assign_trip_zones,
    build_index,
    load_zones,
    locate,
    save_zones_geojson,
    synthetic_zone_grid,
    zones_to_geojson,
)

from conftest import BASE_TS


def brute_force_locate(zones: ZoneSet, point) -> int | None:
    """Oracle: scan every zone, return the lowest matching zone_id."""
    hits = [z.zone_id for z in zones if point_in_ring(point, z.ring)]
    return min(hits) if hits else None


def load_doc(doc: dict) -> ZoneSet:
    return load_zones(io.StringIO(json.dumps(doc)))


def feature(zone_id, ring, name=None, district=None):
    props = {"zone_id": zone_id}
    if name is not None:
        props["name"] = name
    if district is not None:
        props["district"] = district
    return {
        "type": "Feature",
        "properties": props,
        "geometry": {"type": "Polygon", "coordinates": [[list(p) for p in ring]]},
    }


SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]


class TestLoad:
    def test_round_trip(self, tmp_path):
        zones = synthetic_zone_grid()
        path = tmp_path / "zones.geojson"
        save_zones_geojson(zones, path)
        loaded = load_zones(path)
        assert loaded == zones

    def test_minimal_feature(self):
        doc = {"type": "FeatureCollection", "features": [feature(7, SQUARE)]}
        zones = load_doc(doc)
        zone = zones.by_id(7)
        assert zone.name == "zone-7"
        assert zone.district == ""

    def test_duplicate_ids(self):
        doc = {
            "type": "FeatureCollection",
            "features": [feature(1, SQUARE), feature(1, SQUARE)],
        }
        with pytest.raises(ZoneValidationError, match="duplicate"):
            load_doc(doc)

    def test_missing_zone_id(self):
        bad = feature(1, SQUARE)
        del bad["properties"]["zone_id"]
        with pytest.raises(ZoneValidationError, match="zone_id"):
            load_doc({"type": "FeatureCollection", "features": [bad]})

    def test_hole_rejected(self):
        bad = feature(3, SQUARE)
        inner = [[0.2, 0.2], [0.8, 0.2], [0.8, 0.8], [0.2, 0.8], [0.2, 0.2]]
        bad["geometry"]["coordinates"].append(inner)
        with pytest.raises(ZoneValidationError, match="zone 3"):
            load_doc({"type": "FeatureCollection", "features": [bad]})

    def test_bad_ring_names_zone(self):
        open_ring = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        doc = {"type": "FeatureCollection", "features": [feature(42, open_ring)]}
        with pytest.raises(ZoneValidationError, match="zone 42"):
            load_doc(doc)

    def test_non_polygon_rejected(self):
        bad = feature(5, SQUARE)
        bad["geometry"] = {"type": "MultiPolygon", "coordinates": []}
        with pytest.raises(ZoneValidationError, match="zone 5"):
            load_doc({"type": "FeatureCollection", "features": [bad]})

    def test_geojson_writer_sorted(self):
        z2 = TrafficZone(zone_id=2, name="b", district="d", ring=tuple(map(tuple, SQUARE)))
        shifted = [(x + 2, y) for x, y in SQUARE]
        z1 = TrafficZone(zone_id=1, name="a", district="d", ring=tuple(shifted))
        doc = zones_to_geojson(ZoneSet(zones=(z2, z1)))
        assert [f["properties"]["zone_id"] for f in doc["features"]] == [1, 2]

    def test_overlap_warning(self, caplog):
        near = [(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5), (0.5, 0.5)]
        doc = {
            "type": "FeatureCollection",
            "features": [feature(1, SQUARE), feature(2, near)],
        }
        with caplog.at_level(logging.WARNING):
            zones = load_doc(doc)
        assert len(zones) == 2  # overlap warns, never rejects
        assert any("overlap" in message for message in caplog.messages)

    def test_file_path_str(self, tmp_path):
        path = tmp_path / "z.geojson"
        path.write_text(json.dumps({"type": "FeatureCollection", "features": [feature(1, SQUARE)]}))
        assert len(load_zones(str(path))) == 1


class TestSyntheticGrid:
    def test_shape(self):
        zones = synthetic_zone_grid()
        assert len(zones) == DEFAULT_GRID_ROWS * DEFAULT_GRID_COLS == 228
        assert zones.ids() == set(range(1, 229))

    def test_row_major_layout(self):
        zones = synthetic_zone_grid()
        west, south, east, north = DEFAULT_GRID_BBOX
        cell_w = (east - west) / DEFAULT_GRID_COLS
        cell_h = (north - south) / DEFAULT_GRID_ROWS
        first = zones.by_id(1)
        assert first.bbox == pytest.approx((west, south, west + cell_w, south + cell_h))
        # Second row starts one column stride after the first row ends.
        row2 = zones.by_id(DEFAULT_GRID_COLS + 1)
        assert row2.bbox[1] == pytest.approx(south + cell_h)
        assert row2.bbox[0] == pytest.approx(west)

    def test_names_and_districts(self):
        zones = synthetic_zone_grid()
        assert zones.by_id(1).name == "Z001"
        assert zones.by_id(228).name == "Z228"
        assert zones.by_id(1).district == "district-1"
        assert zones.by_id(7).district == "district-1"  # cycle of 6
        assert zones.by_id(6).district == "district-6"

    def test_tiling_covers_bbox(self):
        zones = synthetic_zone_grid()
        index = build_index(zones)
        west, south, east, north = DEFAULT_GRID_BBOX
        for fx in (0.0, 0.21, 0.5, 0.93, 1.0):
            for fy in (0.0, 0.37, 0.77, 1.0):
                point = (west + fx * (east - west), south + fy * (north - south))
                assert index.locate(*point) is not None


class TestIndex:
    def test_outside_bbox(self, grid_228):
        index = build_index(grid_228)
        assert index.locate(0.0, 0.0) is None
        assert index.locate(113.799, 22.6) is None

    def test_interior_match(self, grid_228):
        index = build_index(grid_228)
        zone = grid_228.by_id(100)
        assert index.locate(*zone.centroid) == 100

    def test_shared_edge_lowest_id(self, grid_228):
        index = build_index(grid_228)
        z1 = grid_228.by_id(1)
        # Right edge of zone 1 is the left edge of zone 2.
        edge_x = z1.bbox[2]
        mid_y = (z1.bbox[1] + z1.bbox[3]) / 2
        assert index.locate(edge_x, mid_y) == 1
        # Corner shared by zones 1, 2, 20, 21.
        assert index.locate(edge_x, z1.bbox[3]) == 1

    def test_matches_brute_force_on_structured_points(self, grid_228):
        index = build_index(grid_228)
        west, south, east, north = DEFAULT_GRID_BBOX
        cell_w = (east - west) / DEFAULT_GRID_COLS
        cell_h = (north - south) / DEFAULT_GRID_ROWS
        points = []
        for i in range(0, DEFAULT_GRID_COLS + 1, 3):
            for j in range(0, DEFAULT_GRID_ROWS + 1, 2):
                x = west + i * cell_w
                y = south + j * cell_h
                points.extend([(x, y), (x + cell_w / 3, y), (x, y + cell_h / 7)])
        for point in points:
            assert index.locate(*point) == brute_force_locate(grid_228, point), point

    @given(
        lon=st.floats(min_value=113.7, max_value=114.7),
        lat=st.floats(min_value=22.4, max_value=22.9),
    )
    @settings(max_examples=300, deadline=None)
    def test_matches_brute_force_random(self, grid_228, lon, lat):
        index = build_index(grid_228)
        assert index.locate(lon, lat) == brute_force_locate(grid_228, (lon, lat))

    def test_irregular_zones(self):
        # Triangle and an L-shape sharing an edge, plus a distant square.
        tri = ((0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (0.0, 0.0))
        ell = ((2.0, 0.0), (4.0, 0.0), (4.0, 3.0), (3.0, 3.0), (3.0, 1.0), (2.0, 1.0), (2.0, 0.0))
        far = ((10.0, 10.0), (11.0, 10.0), (11.0, 11.0), (10.0, 11.0), (10.0, 10.0))
        zones = ZoneSet(
            zones=(
                TrafficZone(zone_id=3, name="tri", district="", ring=tri),
                TrafficZone(zone_id=1, name="ell", district="", ring=ell),
                TrafficZone(zone_id=9, name="far", district="", ring=far),
            )
        )
        index = build_index(zones)
        cases = [
            (0.5, 0.5),
            (3.5, 0.5),
            (3.5, 2.5),
            (2.5, 2.5),  # inside the L notch: nothing
            (2.0, 0.5),  # shared edge: id 1 beats 3
            (10.5, 10.5),
            (5.0, 5.0),
        ]
        for point in cases:
            assert index.locate(*point) == brute_force_locate(zones, point), point

    def test_locate_helper(self, grid_228):
        index = build_index(grid_228)
        zone = grid_228.by_id(50)
        assert locate(index, zone.centroid) == 50


class TestTripAssignment:
    def test_assigns_both_ends(self, grid_228):
        index = build_index(grid_228)
        pickup = grid_228.by_id(10).centroid
        dropoff = grid_228.by_id(200).centroid
        trip = Trip(
            vehicle_id="V1",
            pickup_time=BASE_TS,
            dropoff_time=BASE_TS + 600,
            pickup_point=pickup,
            dropoff_point=dropoff,
            truncated_start=False,
            truncated_end=False,
        )
        (out,) = assign_trip_zones([trip], index)
        assert out.pickup_zone == 10
        assert out.dropoff_zone == 200
        assert trip.pickup_zone is None  # input untouched

    def test_unlocatable_end_stays_none(self, grid_228):
        index = build_index(grid_228)
        trip = Trip(
            vehicle_id="V1",
            pickup_time=BASE_TS,
            dropoff_time=BASE_TS + 600,
            pickup_point=(0.0, 0.0),
            dropoff_point=grid_228.by_id(1).centroid,
            truncated_start=False,
            truncated_end=False,
        )
        (out,) = assign_trip_zones([trip], index)
        assert out.pickup_zone is None
        assert out.dropoff_zone == 1
