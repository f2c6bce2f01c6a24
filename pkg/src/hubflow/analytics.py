"""Hub demand analytics: period schemes, flow series, OD matrices,
accessibility, travel-time reliability, congestion levels, and service
extent.

Conventions used throughout:

* periods are 1-based within a local day (default 12 two-hour periods);
* a flow series is dense: every requested date carries exactly one entry
  per period, zeros included;
* an OD matrix conserves its input: every eligible trip in the window is
  either counted under an (origin, destination) pair or tallied as
  unassigned.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
import os
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence, Union

from .geometry import equirect_distance_m
from .probe import HubDirection, HubEvent, ProbeRecord, Trip, VehicleState
from .zones import ZoneIndex, ZoneSet

SECONDS_PER_DAY = 86_400


class FlowDirection(str, Enum):
    INBOUND = "inbound"  # vehicles entering the hub
    OUTBOUND = "outbound"  # vehicles leaving the hub


_EVENT_FOR_FLOW = {
    FlowDirection.INBOUND: HubDirection.ENTER,
    FlowDirection.OUTBOUND: HubDirection.EXIT,
}


@dataclass(frozen=True)
class PeriodScheme:
    """Partition of the local day into consecutive periods.

    ``boundaries_min`` are period start offsets in minutes from local
    midnight, strictly increasing, beginning at 0.  ``tz_offset_min``
    shifts UTC timestamps into local time before binning.
    """

    periods_per_day: int = 12
    boundaries_min: tuple[int, ...] = (0, 120, 240, 360, 480, 600, 720, 840, 960, 1080, 1200, 1320)
    tz_offset_min: int = 0

    def __post_init__(self) -> None:
        b = self.boundaries_min
        if len(b) != self.periods_per_day:
            raise ValueError(
                f"{len(b)} boundaries for {self.periods_per_day} periods"
            )
        if b[0] != 0:
            raise ValueError("first period must start at local midnight")
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ValueError("period boundaries must be strictly increasing")
        if b[-1] >= 1440:
            raise ValueError("period boundaries must stay within the day")

    @classmethod
    def equal(cls, periods_per_day: int, tz_offset_min: int = 0) -> "PeriodScheme":
        if periods_per_day < 1 or 1440 % periods_per_day:
            raise ValueError("periods_per_day must divide 1440")
        step = 1440 // periods_per_day
        return cls(
            periods_per_day=periods_per_day,
            boundaries_min=tuple(range(0, 1440, step)),
            tz_offset_min=tz_offset_min,
        )

    def _local_seconds(self, ts: float) -> float:
        return ts + self.tz_offset_min * 60

    def date_of(self, ts: float) -> dt.date:
        local = self._local_seconds(ts)
        return (dt.datetime(1970, 1, 1) + dt.timedelta(seconds=local)).date()

    def minute_of_day(self, ts: float) -> float:
        return (self._local_seconds(ts) % SECONDS_PER_DAY) / 60.0

    def period_of(self, ts: float) -> int:
        """1-based period index of a UTC timestamp."""
        return bisect_right(self.boundaries_min, self.minute_of_day(ts))

    def day_window(self, day: dt.date) -> "TimeWindow":
        """UTC half-open window covering one local day."""
        midnight = dt.datetime(day.year, day.month, day.day, tzinfo=dt.timezone.utc)
        start = midnight.timestamp() - self.tz_offset_min * 60
        return TimeWindow(start, start + SECONDS_PER_DAY)

    def period_window(self, day: dt.date, period: int) -> "TimeWindow":
        if not 1 <= period <= self.periods_per_day:
            raise ValueError(f"period {period} outside 1..{self.periods_per_day}")
        day_start = self.day_window(day).start
        start = day_start + self.boundaries_min[period - 1] * 60
        if period == self.periods_per_day:
            end = day_start + SECONDS_PER_DAY
        else:
            end = day_start + self.boundaries_min[period] * 60
        return TimeWindow(start, end)


@dataclass(frozen=True)
class TimeWindow:
    """Half-open UTC interval [start, end) in epoch seconds."""

    start: float
    end: float

    def __post_init__(self) -> None:
        if not self.end > self.start:
            raise ValueError(f"empty window [{self.start}, {self.end})")

    def contains(self, ts: float) -> bool:
        return self.start <= ts < self.end


@dataclass(frozen=True)
class FlowEntry:
    date: dt.date
    period: int
    count: int


@dataclass
class FlowSeries:
    """Dense per-period counts for one flow direction."""

    direction: FlowDirection
    periods_per_day: int
    entries: list[FlowEntry]

    def __post_init__(self) -> None:
        per_date: dict[dt.date, set[int]] = defaultdict(set)
        for e in self.entries:
            if not 1 <= e.period <= self.periods_per_day:
                raise ValueError(f"period {e.period} outside 1..{self.periods_per_day}")
            if e.count < 0:
                raise ValueError(f"negative count on {e.date} period {e.period}")
            if e.period in per_date[e.date]:
                raise ValueError(f"duplicate entry for {e.date} period {e.period}")
            per_date[e.date].add(e.period)
        for day, periods in per_date.items():
            if len(periods) != self.periods_per_day:
                raise ValueError(f"{day} has {len(periods)} periods, want {self.periods_per_day}")
        self.entries = sorted(self.entries, key=lambda e: (e.date, e.period))

    def dates(self) -> list[dt.date]:
        return sorted({e.date for e in self.entries})

    def count(self, date: dt.date, period: int) -> int:
        for e in self.entries:
            if e.date == date and e.period == period:
                return e.count
        raise KeyError((date, period))

    def daily_total(self, date: dt.date) -> int:
        return sum(e.count for e in self.entries if e.date == date)

    def subset(self, dates: Iterable[dt.date]) -> "FlowSeries":
        wanted = set(dates)
        missing = wanted - set(self.dates())
        if missing:
            raise KeyError(f"dates not in series: {sorted(missing)}")
        return FlowSeries(
            direction=self.direction,
            periods_per_day=self.periods_per_day,
            entries=[e for e in self.entries if e.date in wanted],
        )


def hub_flow_series(
    events: Iterable[HubEvent],
    scheme: PeriodScheme,
    start_date: dt.date,
    end_date: dt.date,
    direction: FlowDirection,
) -> FlowSeries:
    """Bin geofence events into a dense (date, period) series.

    Inbound counts enter events, outbound counts exits.  Every date in
    [start_date, end_date] appears with all periods, zeros included.
    """
    if end_date < start_date:
        raise ValueError(f"end date {end_date} before start date {start_date}")
    direction = FlowDirection(direction)
    wanted = _EVENT_FOR_FLOW[direction]
    counts: dict[tuple[dt.date, int], int] = defaultdict(int)
    for ev in events:
        if ev.direction is not wanted:
            continue
        day = scheme.date_of(ev.time)
        if start_date <= day <= end_date:
            counts[(day, scheme.period_of(ev.time))] += 1
    entries = []
    day = start_date
    while day <= end_date:
        for period in range(1, scheme.periods_per_day + 1):
            entries.append(FlowEntry(day, period, counts.get((day, period), 0)))
        day += dt.timedelta(days=1)
    return FlowSeries(direction=direction, periods_per_day=scheme.periods_per_day, entries=entries)


def write_flow_csv(series: FlowSeries, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "period", "count"])
        for e in series.entries:
            writer.writerow([e.date.isoformat(), e.period, e.count])


@dataclass
class ODMatrix:
    """Origin/destination trip counts over a time window.

    Conservation: sum of counts plus unassigned equals the number of
    eligible trips whose pickup fell in the window.
    """

    window: TimeWindow
    counts: dict[tuple[int, int], int] = field(default_factory=dict)
    unassigned: int = 0

    @property
    def total_trips(self) -> int:
        return sum(self.counts.values()) + self.unassigned

    def volume_by_zone(self) -> dict[int, int]:
        """Trip ends per zone: each counted trip contributes to both its
        origin and destination zone."""
        vol: dict[int, int] = defaultdict(int)
        for (origin, dest), n in self.counts.items():
            vol[origin] += n
            vol[dest] += n
        return dict(vol)


def build_od_matrix(
    trips: Iterable[Trip],
    zones: ZoneSet,
    window: TimeWindow,
    include_degenerate: bool = False,
) -> ODMatrix:
    """Aggregate trips into an OD matrix.

    Trips are selected by pickup time.  Zero-duration runs are excluded
    unless ``include_degenerate`` is set.  A trip missing either zone is
    tallied as unassigned; a zone id outside the zone set is an error.
    """
    known = zones.ids()
    matrix = ODMatrix(window=window)
    counts: dict[tuple[int, int], int] = defaultdict(int)
    for trip in trips:
        if not window.contains(trip.pickup_time):
            continue
        if trip.degenerate and not include_degenerate:
            continue
        origin, dest = trip.pickup_zone, trip.dropoff_zone
        if origin is None or dest is None:
            matrix.unassigned += 1
            continue
        if origin not in known or dest not in known:
            raise ValueError(f"trip references unknown zone {origin if origin not in known else dest}")
        counts[(origin, dest)] += 1
    matrix.counts = dict(counts)
    return matrix


def write_od_csv(matrix: ODMatrix, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["origin_zone", "dest_zone", "count"])
        for (origin, dest) in sorted(matrix.counts):
            writer.writerow([origin, dest, matrix.counts[(origin, dest)]])


def nearest_rank(sorted_values: Sequence[float], percentile: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * n)-th smallest value."""
    if not sorted_values:
        raise ValueError("empty sample")
    if not 0 < percentile <= 100:
        raise ValueError(f"percentile {percentile} outside (0, 100]")
    rank = math.ceil(percentile / 100.0 * len(sorted_values))
    return sorted_values[rank - 1]


def _durations_by_zone(
    trips: Iterable[Trip], include_degenerate: bool
) -> dict[int, list[float]]:
    """Minutes of travel grouped by destination zone (hub departures)."""
    groups: dict[int, list[float]] = defaultdict(list)
    for trip in trips:
        if trip.degenerate and not include_degenerate:
            continue
        if trip.dropoff_zone is None:
            continue
        groups[trip.dropoff_zone].append(trip.duration_s / 60.0)
    return groups


@dataclass(frozen=True)
class ZoneAccessibility:
    zone_id: int
    samples: int
    mean_minutes: float | None
    reachable: bool


@dataclass
class AccessibilityResult:
    budget_minutes: float
    min_samples: int
    zones: dict[int, ZoneAccessibility]

    def reachable_ids(self) -> set[int]:
        return {z.zone_id for z in self.zones.values() if z.reachable}


def accessibility(
    trips: Iterable[Trip],
    zones: ZoneSet,
    budget_minutes: float,
    min_samples: int = 5,
    include_degenerate: bool = False,
) -> AccessibilityResult:
    """Which zones are reachable from the hub within a time budget.

    ``trips`` must be hub departures with destination zones assigned.
    A zone is reachable when it has at least ``min_samples`` observed
    trips and their mean travel time does not exceed the budget (boundary
    inclusive).  Raising the budget never shrinks the reachable set.
    """
    if budget_minutes <= 0 or not math.isfinite(budget_minutes):
        raise ValueError(f"budget must be positive, got {budget_minutes}")
    if min_samples < 1:
        raise ValueError("min_samples must be at least 1")
    groups = _durations_by_zone(trips, include_degenerate)
    out: dict[int, ZoneAccessibility] = {}
    for zone in zones:
        durations = groups.get(zone.zone_id, [])
        n = len(durations)
        mean = sum(durations) / n if n else None
        reachable = n >= min_samples and mean is not None and mean <= budget_minutes
        out[zone.zone_id] = ZoneAccessibility(zone.zone_id, n, mean, reachable)
    return AccessibilityResult(budget_minutes, min_samples, out)


@dataclass(frozen=True)
class ZoneReliability:
    zone_id: int
    samples: int
    median_minutes: float | None
    p10_minutes: float | None
    p90_minutes: float | None
    spread_index: float | None
    classification: str  # "reliable" | "poor" | "undefined"


@dataclass
class ReliabilityResult:
    threshold: float
    min_samples: int
    zones: dict[int, ZoneReliability]


def reliability(
    trips: Iterable[Trip],
    zones: ZoneSet,
    min_samples: int = 5,
    threshold: float = 0.5,
    include_degenerate: bool = False,
) -> ReliabilityResult:
    """Travel-time spread per destination zone.

    Spread index is (p90 - p10) / median with nearest-rank percentiles.
    Zones under ``min_samples`` are classified undefined; otherwise poor
    when the spread exceeds ``threshold``, else reliable.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if min_samples < 1:
        raise ValueError("min_samples must be at least 1")
    groups = _durations_by_zone(trips, include_degenerate)
    out: dict[int, ZoneReliability] = {}
    for zone in zones:
        durations = sorted(groups.get(zone.zone_id, []))
        n = len(durations)
        if n == 0:
            out[zone.zone_id] = ZoneReliability(zone.zone_id, 0, None, None, None, None, "undefined")
            continue
        median = nearest_rank(durations, 50)
        p10 = nearest_rank(durations, 10)
        p90 = nearest_rank(durations, 90)
        spread = (p90 - p10) / median if median > 0 else math.inf
        if n < min_samples:
            label = "undefined"
        else:
            label = "poor" if spread > threshold else "reliable"
        out[zone.zone_id] = ZoneReliability(zone.zone_id, n, median, p10, p90, spread, label)
    return ReliabilityResult(threshold, min_samples, out)


@dataclass(frozen=True)
class CongestionThresholds:
    """Mean-speed cutoffs in km/h: >= free_min is free flow, >= slow_min is
    slowed, anything below is congested."""

    free_min_kmh: float = 30.0
    slow_min_kmh: float = 15.0

    def __post_init__(self) -> None:
        if not 0 < self.slow_min_kmh < self.free_min_kmh:
            raise ValueError("need 0 < slow_min_kmh < free_min_kmh")

    def classify(self, mean_speed_kmh: float | None) -> str:
        if mean_speed_kmh is None:
            return "unknown"
        if mean_speed_kmh >= self.free_min_kmh:
            return "free"
        if mean_speed_kmh >= self.slow_min_kmh:
            return "slow"
        return "congested"


@dataclass(frozen=True)
class CongestionCell:
    zone_id: int
    period: int
    samples: int
    mean_speed_kmh: float | None
    level: str


@dataclass
class CongestionGrid:
    date: dt.date
    thresholds: CongestionThresholds
    cells: dict[tuple[int, int], CongestionCell]

    def level(self, zone_id: int, period: int) -> str:
        return self.cells[(zone_id, period)].level


def road_condition(
    records: Iterable[ProbeRecord],
    index: ZoneIndex,
    scheme: PeriodScheme,
    date: dt.date,
    thresholds: CongestionThresholds = CongestionThresholds(),
) -> CongestionGrid:
    """Classify every (zone, period) of one local day by mean probe speed.

    Only in-service records count.  Cells without records are unknown.
    """
    sums: dict[tuple[int, int], float] = defaultdict(float)
    counts: dict[tuple[int, int], int] = defaultdict(int)
    for rec in records:
        if rec.state is not VehicleState.IN_SERVICE:
            continue
        if scheme.date_of(rec.timestamp) != date:
            continue
        zone_id = index.locate(rec.lon, rec.lat)
        if zone_id is None:
            continue
        key = (zone_id, scheme.period_of(rec.timestamp))
        sums[key] += rec.speed_kmh
        counts[key] += 1
    cells = {}
    for zone in index.zone_set:
        for period in range(1, scheme.periods_per_day + 1):
            key = (zone.zone_id, period)
            n = counts.get(key, 0)
            mean = sums[key] / n if n else None
            cells[key] = CongestionCell(zone.zone_id, period, n, mean, thresholds.classify(mean))
    return CongestionGrid(date=date, thresholds=thresholds, cells=cells)


def compute_service_extent(
    matrix: ODMatrix,
    zones: ZoneSet,
    hub: tuple[float, float],
    q: float,
) -> float:
    """Smallest radius (km) around the hub covering a share q of OD volume.

    Volume per zone counts trip ends (origin plus destination).  Zones are
    swept outward by centroid distance; the answer is the distance at
    which the cumulative share first reaches q.  Monotone in q.
    """
    if not 0 < q <= 1:
        raise ValueError(f"q must be in (0, 1], got {q}")
    volumes = matrix.volume_by_zone()
    total = sum(volumes.values())
    if total == 0:
        raise ValueError("no volume: OD matrix has no assigned trips")
    ref_lat = zones.mean_latitude()
    dist_vol: dict[float, int] = defaultdict(int)
    for zone_id, vol in volumes.items():
        centroid = zones.by_id(zone_id).centroid
        d_km = equirect_distance_m(hub, centroid, ref_lat) / 1000.0
        dist_vol[d_km] += vol
    cumulative = 0
    for d_km in sorted(dist_vol):
        cumulative += dist_vol[d_km]
        if cumulative >= q * total:
            return d_km
    return max(dist_vol)  # unreachable: cumulative hits total at the last distance
