"""Shared builders for tests."""

from __future__ import annotations

import datetime as dt

import pytest

from hubflow.probe import ProbeRecord, Track, VehicleState
from hubflow.zones import ZoneSet, synthetic_zone_grid

UTC = dt.timezone.utc

BASE_TS = dt.datetime(2011, 8, 12, 0, 0, tzinfo=UTC).timestamp()


def make_record(
    vehicle: str = "V1",
    ts: float = BASE_TS,
    lon: float = 114.05,
    lat: float = 22.55,
    speed: float = 30.0,
    heading: float = 90.0,
    state: VehicleState = VehicleState.IN_SERVICE,
    occupied: bool = False,
) -> ProbeRecord:
    return ProbeRecord(
        vehicle_id=vehicle,
        timestamp=ts,
        lon=lon,
        lat=lat,
        speed_kmh=speed,
        heading_deg=heading,
        state=state,
        occupied=occupied,
    )


def track_from_pattern(occupancy: list[bool], vehicle: str = "V1", step: float = 60.0) -> Track:
    """Track with one record per flag, spaced ``step`` seconds apart."""
    records = [
        make_record(vehicle=vehicle, ts=BASE_TS + i * step, occupied=flag)
        for i, flag in enumerate(occupancy)
    ]
    return Track(vehicle_id=vehicle, records=records)


@pytest.fixture(scope="session")
def grid_228() -> ZoneSet:
    return synthetic_zone_grid()
