"""Taxi probe ingestion: GPS record parsing, per-vehicle tracks, occupied
trips, and hub geofence events.

Parsing is total over data lines: every non-blank line either becomes a
record or lands in the reject log with a reason, so feed quality is
measurable instead of silent.  Downstream steps are pure functions over
parsed records.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import IO, Iterable, Sequence, Union

from .geometry import Point, equirect_distance_m, point_in_ring, validate_ring

PROBE_CSV_HEADER = (
    "vehicle_id",
    "timestamp",
    "lon",
    "lat",
    "speed_kmh",
    "heading_deg",
    "state",
    "occupied",
)


class ProbeFormatError(ValueError):
    """Raised when the stream is not a probe CSV at all (bad header)."""


class GeofenceError(ValueError):
    """Raised for an unusable geofence definition."""


class VehicleState(Enum):
    OUT_OF_SERVICE = 0
    IN_SERVICE = 1
    UNKNOWN = 2


class HubDirection(str, Enum):
    ENTER = "enter"
    EXIT = "exit"


@dataclass(frozen=True)
class ProbeRecord:
    vehicle_id: str
    timestamp: float  # UTC epoch seconds
    lon: float
    lat: float
    speed_kmh: float
    heading_deg: float  # [0, 360)
    state: VehicleState
    occupied: bool


@dataclass(frozen=True)
class Reject:
    line_number: int
    reason: str
    raw: str


@dataclass
class RejectLog:
    entries: list[Reject] = field(default_factory=list)

    def add(self, line_number: int, reason: str, raw: str) -> None:
        self.entries.append(Reject(line_number, reason, raw))

    def __len__(self) -> int:
        return len(self.entries)

    def reasons(self) -> list[str]:
        return [r.reason for r in self.entries]


@dataclass
class Track:
    """One vehicle's records, strictly increasing in time."""

    vehicle_id: str
    records: list[ProbeRecord]


@dataclass
class Trip:
    """A maximal occupied run within one track.

    ``truncated_start``/``truncated_end`` mark runs that touch the track
    boundary, where the true pickup or dropoff may lie outside the data.
    Single-record runs are kept but carry zero duration.
    """

    vehicle_id: str
    pickup_time: float
    dropoff_time: float
    pickup_point: Point
    dropoff_point: Point
    pickup_zone: int | None = None
    dropoff_zone: int | None = None
    truncated_start: bool = False
    truncated_end: bool = False
    mode: str = "taxi"

    @property
    def duration_s(self) -> float:
        return self.dropoff_time - self.pickup_time

    @property
    def degenerate(self) -> bool:
        return self.dropoff_time <= self.pickup_time


@dataclass(frozen=True)
class HubEvent:
    vehicle_id: str
    time: float
    direction: HubDirection


@dataclass(frozen=True)
class CircleGeofence:
    center: Point  # (lon, lat)
    radius_m: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.radius_m) or self.radius_m <= 0:
            raise GeofenceError(f"geofence radius must be positive, got {self.radius_m}")

    def contains(self, lon: float, lat: float) -> bool:
        # Boundary-inclusive, consistent with zone containment.
        d = equirect_distance_m((lon, lat), self.center, self.center[1])
        return d <= self.radius_m


@dataclass(frozen=True)
class PolygonGeofence:
    ring: tuple[Point, ...]

    def __post_init__(self) -> None:
        defects = validate_ring(self.ring)
        if defects:
            raise GeofenceError("invalid geofence ring: " + "; ".join(defects))

    def contains(self, lon: float, lat: float) -> bool:
        return point_in_ring((lon, lat), self.ring)


Geofence = Union[CircleGeofence, PolygonGeofence]


def _parse_timestamp(text: str) -> float:
    """ISO-8601 with an explicit UTC offset; returns epoch seconds."""
    cleaned = text.strip()
    if cleaned.endswith(("Z", "z")):
        cleaned = cleaned[:-1] + "+00:00"
    dt = datetime.fromisoformat(cleaned)
    if dt.tzinfo is None:
        raise _NaiveTimestamp()
    return dt.timestamp()


class _NaiveTimestamp(Exception):
    pass


def _parse_line(row: Sequence[str]) -> ProbeRecord:
    """Convert a validated-width CSV row; raises _FieldError on bad fields."""
    vehicle_id = row[0].strip()
    if not vehicle_id:
        raise _FieldError("empty vehicle_id")
    try:
        ts = _parse_timestamp(row[1])
    except _NaiveTimestamp:
        raise _FieldError("timestamp missing timezone")
    except ValueError:
        raise _FieldError("bad timestamp")
    try:
        lon = float(row[2])
    except ValueError:
        raise _FieldError("bad lon")
    try:
        lat = float(row[3])
    except ValueError:
        raise _FieldError("bad lat")
    try:
        speed = float(row[4])
    except ValueError:
        raise _FieldError("bad speed")
    try:
        heading = float(row[5])
    except ValueError:
        raise _FieldError("bad heading")
    if not math.isfinite(lon) or not -180.0 <= lon <= 180.0:
        raise _FieldError("lon out of range")
    if not math.isfinite(lat) or not -90.0 <= lat <= 90.0:
        raise _FieldError("lat out of range")
    if not math.isfinite(speed) or speed < 0.0:
        raise _FieldError("speed out of range")
    if not math.isfinite(heading) or not 0.0 <= heading < 360.0:
        raise _FieldError("heading out of range")
    state_raw = row[6].strip()
    if state_raw not in ("0", "1", "2"):
        raise _FieldError("bad state")
    occupied_raw = row[7].strip()
    if occupied_raw not in ("0", "1"):
        raise _FieldError("bad occupied")
    return ProbeRecord(
        vehicle_id=vehicle_id,
        timestamp=ts,
        lon=lon,
        lat=lat,
        speed_kmh=speed,
        heading_deg=heading,
        state=VehicleState(int(state_raw)),
        occupied=occupied_raw == "1",
    )


class _FieldError(Exception):
    def __init__(self, reason: str) -> None:
        self.reason = reason


def parse_probe_csv(source: Union[str, os.PathLike, IO]) -> tuple[list[ProbeRecord], RejectLog]:
    """Parse a probe CSV stream or path.

    Returns (records, reject_log) with input order preserved.  Blank lines
    are ignored; any other malformed line is rejected with a reason, never
    dropped silently.  A wrong header raises ProbeFormatError and an
    unreadable source propagates its OSError.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return parse_probe_csv(fh)
    raw = source.read()
    if isinstance(raw, bytes):
        text = raw.decode("utf-8")
    else:
        text = raw

    records: list[ProbeRecord] = []
    rejects = RejectLog()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ProbeFormatError("empty stream, missing header")
    header = next(csv.reader([lines[0]]))
    if [h.strip() for h in header] != list(PROBE_CSV_HEADER):
        raise ProbeFormatError(
            f"unexpected header {header!r}, want {','.join(PROBE_CSV_HEADER)}"
        )
    for line_number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        row = next(csv.reader([line]))
        if len(row) != len(PROBE_CSV_HEADER):
            rejects.add(line_number, "field count", line)
            continue
        try:
            records.append(_parse_line(row))
        except _FieldError as err:
            rejects.add(line_number, err.reason, line)
    return records, rejects


def build_tracks(records: Iterable[ProbeRecord]) -> list[Track]:
    """Group records by vehicle into time-ordered tracks.

    Sorting is stable, exact duplicates collapse, and when two different
    records share a timestamp the first by input order wins, so timestamps
    are strictly increasing within each track.
    """
    by_vehicle: dict[str, list[ProbeRecord]] = {}
    for rec in records:
        by_vehicle.setdefault(rec.vehicle_id, []).append(rec)
    tracks = []
    for vehicle_id in sorted(by_vehicle):
        recs = sorted(by_vehicle[vehicle_id], key=lambda r: r.timestamp)
        kept: list[ProbeRecord] = []
        for rec in recs:
            if kept and rec.timestamp <= kept[-1].timestamp:
                continue
            kept.append(rec)
        tracks.append(Track(vehicle_id=vehicle_id, records=kept))
    return tracks


def extract_trips(track: Track) -> list[Trip]:
    """Cut a track into trips, one per maximal run of occupied records."""
    trips: list[Trip] = []
    recs = track.records
    n = len(recs)
    i = 0
    while i < n:
        if not recs[i].occupied:
            i += 1
            continue
        j = i
        while j + 1 < n and recs[j + 1].occupied:
            j += 1
        first, last = recs[i], recs[j]
        trips.append(
            Trip(
                vehicle_id=track.vehicle_id,
                pickup_time=first.timestamp,
                dropoff_time=last.timestamp,
                pickup_point=(first.lon, first.lat),
                dropoff_point=(last.lon, last.lat),
                truncated_start=i == 0,
                truncated_end=j == n - 1,
            )
        )
        i = j + 1
    return trips


def detect_hub_events(track: Track, geofence: Geofence) -> list[HubEvent]:
    """Geofence crossing events for one track.

    Emits one event per inside/outside transition, timestamped at the
    first record on the new side.  The state before the first record is
    unknown, so the first record never produces an event.
    """
    events: list[HubEvent] = []
    prev_inside: bool | None = None
    for rec in track.records:
        inside = geofence.contains(rec.lon, rec.lat)
        if prev_inside is not None and inside != prev_inside:
            events.append(
                HubEvent(
                    vehicle_id=track.vehicle_id,
                    time=rec.timestamp,
                    direction=HubDirection.ENTER if inside else HubDirection.EXIT,
                )
            )
        prev_inside = inside
    return events
