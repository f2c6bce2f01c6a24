"""Seeded synthetic scenario generator.

Builds a self-consistent city: a rectangular zone grid, a hub with a
circular geofence, a small bus network, and per-trip probe tracks whose
geofence crossings land in chosen (date, period) bins.  Ground-truth
tables are emitted alongside so the full ingest pipeline can be checked
end to end.  Identical configs (same seed included) produce byte-identical
output.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .analytics import FlowDirection, PeriodScheme
from .transfer import BusNetwork, BusRoute, Station, network_to_dict
from .zones import (
    DEFAULT_GRID_BBOX,
    DEFAULT_GRID_COLS,
    DEFAULT_GRID_ROWS,
    TrafficZone,
    ZoneSet,
    save_zones_geojson,
    synthetic_zone_grid,
)
from .geometry import equirect_distance_m, point_in_ring

METERS_PER_DEG_LAT = 111_320.0

# Speed draw ranges per congestion band, strictly inside the default
# classification cutoffs so per-cell means cannot straddle a boundary.
SPEED_BANDS = {
    "free": (32.0, 58.0),
    "slow": (16.0, 29.0),
    "congested": (4.0, 14.0),
}

DEFAULT_INBOUND_MEANS = (20.0, 8.0, 10.0, 35.0, 70.0, 85.0, 80.0, 85.0, 95.0, 90.0, 70.0, 40.0)
DEFAULT_OUTBOUND_MEANS = (25.0, 10.0, 8.0, 30.0, 65.0, 80.0, 85.0, 90.0, 100.0, 85.0, 65.0, 35.0)


def zone_band(zone_id: int) -> str:
    """Deterministic congestion band for a synthetic zone."""
    return ("free", "slow", "congested")[zone_id % 3]


@dataclass(frozen=True)
class EventDay:
    date: dt.date
    multiplier: float


@dataclass
class ScenarioConfig:
    seed: int = 0
    start_date: dt.date = dt.date(2011, 8, 1)
    end_date: dt.date = dt.date(2011, 10, 31)
    inbound_means: tuple[float, ...] = DEFAULT_INBOUND_MEANS
    outbound_means: tuple[float, ...] = DEFAULT_OUTBOUND_MEANS
    noise: str = "none"  # "none" | "poisson"
    event_days: tuple[EventDay, ...] = ()
    missing_days: tuple[dt.date, ...] = ()
    zone_weights: dict[int, float] | None = None  # None: uniform over zones near the hub
    hub: tuple[float, float] | None = None  # None: centroid of the central zone
    geofence_radius_m: float = 300.0
    scheme: PeriodScheme = field(default_factory=PeriodScheme)
    grid_bbox: tuple[float, float, float, float] = DEFAULT_GRID_BBOX
    grid_rows: int = DEFAULT_GRID_ROWS
    grid_cols: int = DEFAULT_GRID_COLS

    def __post_init__(self) -> None:
        if self.end_date < self.start_date:
            raise ValueError("end_date before start_date")
        if self.noise not in ("none", "poisson"):
            raise ValueError(f"noise must be 'none' or 'poisson', got {self.noise!r}")
        n = self.scheme.periods_per_day
        if len(self.inbound_means) != n or len(self.outbound_means) != n:
            raise ValueError(f"mean vectors must have {n} entries")
        if any(m < 0 for m in self.inbound_means + self.outbound_means):
            raise ValueError("period means must be nonnegative")
        if self.geofence_radius_m <= 0:
            raise ValueError("geofence radius must be positive")
        for ev in self.event_days:
            if ev.multiplier <= 0:
                raise ValueError(f"event multiplier must be positive on {ev.date}")

    def dates(self) -> list[dt.date]:
        skip = set(self.missing_days)
        out = []
        day = self.start_date
        while day <= self.end_date:
            if day not in skip:
                out.append(day)
            day += dt.timedelta(days=1)
        return out

    def multiplier(self, day: dt.date) -> float:
        for ev in self.event_days:
            if ev.date == day:
                return ev.multiplier
        return 1.0


@dataclass
class ScenarioData:
    probe_csv: str
    zones: ZoneSet
    network: BusNetwork
    hub: tuple[float, float]
    hub_zone_id: int
    truth_flows: dict[tuple[dt.date, int, str], int]
    truth_zone_trips: dict[tuple[int, str], int]


def _find_zone(zones: ZoneSet, point: tuple[float, float]) -> int:
    for z in zones:
        if point_in_ring(point, z.ring):
            return z.zone_id
    raise ValueError(f"point {point} is outside every zone")


def _default_weights(zones: ZoneSet, hub: tuple[float, float], hub_zone_id: int) -> dict[int, float]:
    """Uniform demand over the 12 non-hub zones nearest the hub."""
    ref_lat = zones.mean_latitude()
    ranked = sorted(
        (z for z in zones if z.zone_id != hub_zone_id),
        key=lambda z: (equirect_distance_m(hub, z.centroid, ref_lat), z.zone_id),
    )
    chosen = ranked[:12]
    return {z.zone_id: 1.0 / len(chosen) for z in chosen}


def _default_network(zones: ZoneSet, hub: tuple[float, float]) -> BusNetwork:
    """Small fixed topology: two chains sharing one transfer station."""
    picks = [zones.zones[i * len(zones.zones) // 6].centroid for i in range(1, 6)]
    stations = {"B1": Station("B1", "hub-terminal", hub[0], hub[1])}
    for i, (lon, lat) in enumerate(picks, start=2):
        sid = f"B{i}"
        stations[sid] = Station(sid, f"stop-{i}", lon, lat)
    routes = {
        "R1": BusRoute("R1", ("B1", "B2", "B3")),
        "R2": BusRoute("R2", ("B3", "B4", "B5")),
        "R3": BusRoute("R3", ("B1", "B6", "B5")),
    }
    return BusNetwork(stations=stations, routes=routes)


def _meters_to_deg(dx_m: float, dy_m: float, lat: float) -> tuple[float, float]:
    return (
        dx_m / (METERS_PER_DEG_LAT * math.cos(math.radians(lat))),
        dy_m / METERS_PER_DEG_LAT,
    )


class _TripWriter:
    """Accumulates CSV lines with fixed formatting for byte stability."""

    def __init__(self) -> None:
        self.buf = io.StringIO()
        self.buf.write(",".join((
            "vehicle_id", "timestamp", "lon", "lat",
            "speed_kmh", "heading_deg", "state", "occupied",
        )) + "\n")
        self._seq = 0

    def next_vehicle(self) -> str:
        self._seq += 1
        return f"V{self._seq:06d}"

    def record(self, vehicle: str, ts: int, lon: float, lat: float,
               speed: float, heading: float, occupied: bool) -> None:
        stamp = dt.datetime.fromtimestamp(ts, tz=dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        self.buf.write(
            f"{vehicle},{stamp},{lon:.6f},{lat:.6f},{speed:.1f},{heading:.1f},1,{1 if occupied else 0}\n"
        )


class _Sampler:
    def __init__(self, rng: np.random.Generator, zones: ZoneSet,
                 hub: tuple[float, float], fence_m: float,
                 weights: dict[int, float]) -> None:
        self.rng = rng
        self.zones = {z.zone_id: z for z in zones}
        self.hub = hub
        self.fence_m = fence_m
        ids = sorted(weights)
        total = sum(weights[i] for i in ids)
        if not math.isclose(total, 1.0, rel_tol=1e-6):
            raise ValueError(f"zone weights sum to {total}, want 1")
        self.zone_ids = np.array(ids)
        self.probs = np.array([weights[i] / total for i in ids])

    def pick_zone(self) -> TrafficZone:
        zone_id = int(self.rng.choice(self.zone_ids, p=self.probs))
        return self.zones[zone_id]

    def point_in_zone(self, zone: TrafficZone) -> tuple[float, float]:
        """Uniform point inside the zone, kept clear of the hub geofence."""
        x0, y0, x1, y1 = zone.bbox
        mx, my = (x1 - x0) * 0.05, (y1 - y0) * 0.05
        for _ in range(50):
            lon = float(self.rng.uniform(x0 + mx, x1 - mx))
            lat = float(self.rng.uniform(y0 + my, y1 - my))
            if not point_in_ring((lon, lat), zone.ring):
                continue
            if equirect_distance_m((lon, lat), self.hub, self.hub[1]) > 4 * self.fence_m:
                return (lon, lat)
        # Last resort: the zone corner farthest from the hub.
        corners = list(zone.ring[:-1])
        return max(corners, key=lambda c: equirect_distance_m(c, self.hub, self.hub[1]))

    def hub_point(self) -> tuple[float, float]:
        r = self.fence_m * 0.25
        dx, dy = _meters_to_deg(
            float(self.rng.uniform(-r, r)), float(self.rng.uniform(-r, r)), self.hub[1]
        )
        return (self.hub[0] + dx, self.hub[1] + dy)

    def outside_point(self, toward: tuple[float, float]) -> tuple[float, float]:
        """A point at 2.5 fence radii from the hub toward a target."""
        dx_m = (toward[0] - self.hub[0]) * METERS_PER_DEG_LAT * math.cos(math.radians(self.hub[1]))
        dy_m = (toward[1] - self.hub[1]) * METERS_PER_DEG_LAT
        norm = math.hypot(dx_m, dy_m) or 1.0
        d = 2.5 * self.fence_m
        ox, oy = _meters_to_deg(dx_m / norm * d, dy_m / norm * d, self.hub[1])
        return (self.hub[0] + ox, self.hub[1] + oy)

    def speed_in_band(self, band: str) -> float:
        lo, hi = SPEED_BANDS[band]
        return float(self.rng.uniform(lo, hi))

    def heading(self) -> float:
        return round(float(self.rng.uniform(0.0, 359.9)), 1) % 360.0


def generate(config: ScenarioConfig) -> ScenarioData:
    """Produce the probe CSV plus ground-truth tables for a scenario."""
    zones = synthetic_zone_grid(config.grid_bbox, config.grid_rows, config.grid_cols)
    if config.hub is not None:
        hub = config.hub
    else:
        center = (
            (config.grid_bbox[0] + config.grid_bbox[2]) / 2 + 1e-9,
            (config.grid_bbox[1] + config.grid_bbox[3]) / 2 + 1e-9,
        )
        hub = zones.by_id(_find_zone(zones, center)).centroid
    hub_zone_id = _find_zone(zones, hub)
    weights = config.zone_weights or _default_weights(zones, hub, hub_zone_id)
    if hub_zone_id in weights:
        raise ValueError(f"zone weights must not include the hub zone {hub_zone_id}")
    unknown = set(weights) - zones.ids()
    if unknown:
        raise ValueError(f"zone weights reference unknown zones {sorted(unknown)}")

    rng = np.random.default_rng(config.seed)
    sampler = _Sampler(rng, zones, hub, config.geofence_radius_m, weights)
    writer = _TripWriter()
    truth_flows: dict[tuple[dt.date, int, str], int] = {}
    truth_zone_trips: dict[tuple[int, str], int] = {}
    hub_band = zone_band(hub_zone_id)

    for day in config.dates():
        mult = config.multiplier(day)
        for direction, means in (
            (FlowDirection.OUTBOUND, config.outbound_means),
            (FlowDirection.INBOUND, config.inbound_means),
        ):
            for period in range(1, config.scheme.periods_per_day + 1):
                lam = means[period - 1] * mult
                if config.noise == "poisson":
                    n = int(rng.poisson(lam))
                else:
                    n = int(round(lam))
                truth_flows[(day, period, direction.value)] = n
                window = config.scheme.period_window(day, period)
                for _ in range(n):
                    _emit_trip(config, sampler, writer, window, direction,
                               hub_band, truth_zone_trips)

    return ScenarioData(
        probe_csv=writer.buf.getvalue(),
        zones=zones,
        network=_default_network(zones, hub),
        hub=hub,
        hub_zone_id=hub_zone_id,
        truth_flows=truth_flows,
        truth_zone_trips=truth_zone_trips,
    )


def _emit_trip(config, sampler, writer, window, direction, hub_band, truth_zone_trips):
    zone = sampler.pick_zone()
    far_point = sampler.point_in_zone(zone)
    hub_point = sampler.hub_point()
    t_event = int(sampler.rng.uniform(window.start + 120, window.end - 180))
    band = zone_band(zone.zone_id)
    travel_kmh = sampler.speed_in_band(band)
    dist_km = equirect_distance_m(sampler.hub, far_point, sampler.hub[1]) / 1000.0
    duration = int(max(300.0, dist_km / travel_kmh * 3600.0 * sampler.rng.uniform(0.95, 1.1)))
    vehicle = writer.next_vehicle()
    heading = sampler.heading()
    edge_point = sampler.outside_point(far_point)
    key = (zone.zone_id, direction.value)
    truth_zone_trips[key] = truth_zone_trips.get(key, 0) + 1

    def hub_speed() -> float:
        return sampler.speed_in_band(hub_band)

    def zone_speed() -> float:
        return sampler.speed_in_band(band)

    if direction is FlowDirection.OUTBOUND:
        # Exit event fires at the first record past the fence (t_event).
        t_pick = t_event - 30
        rows = [
            (t_pick - 60, hub_point, hub_speed(), False),
            (t_pick, hub_point, hub_speed(), True),
            (t_event, edge_point, hub_speed(), True),
            (t_pick + duration, far_point, zone_speed(), True),
            (t_pick + duration + 60, far_point, zone_speed(), False),
        ]
    else:
        # Enter event fires at the first record inside the fence (t_event).
        t_pick = t_event - duration
        rows = [
            (t_pick - 60, far_point, zone_speed(), False),
            (t_pick, far_point, zone_speed(), True),
            (t_event - 30, edge_point, hub_speed(), True),
            (t_event, hub_point, hub_speed(), True),
            (t_event + 60, hub_point, hub_speed(), False),
        ]
    for ts, (lon, lat), speed, occupied in rows:
        writer.record(vehicle, ts, lon, lat, speed, heading, occupied)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    return {
        "seed": config.seed,
        "start_date": config.start_date.isoformat(),
        "end_date": config.end_date.isoformat(),
        "inbound_means": list(config.inbound_means),
        "outbound_means": list(config.outbound_means),
        "noise": config.noise,
        "event_days": [
            {"date": ev.date.isoformat(), "multiplier": ev.multiplier}
            for ev in config.event_days
        ],
        "missing_days": [d.isoformat() for d in config.missing_days],
        "zone_weights": (
            {str(k): v for k, v in config.zone_weights.items()}
            if config.zone_weights is not None
            else None
        ),
        "hub": list(config.hub) if config.hub is not None else None,
        "geofence_radius_m": config.geofence_radius_m,
        "period_scheme": {
            "periods_per_day": config.scheme.periods_per_day,
            "boundaries_min": list(config.scheme.boundaries_min),
            "tz_offset_min": config.scheme.tz_offset_min,
        },
        "grid_bbox": list(config.grid_bbox),
        "grid_rows": config.grid_rows,
        "grid_cols": config.grid_cols,
    }


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    scheme_doc = doc.get("period_scheme") or {}
    scheme = PeriodScheme(
        periods_per_day=scheme_doc.get("periods_per_day", 12),
        boundaries_min=tuple(
            scheme_doc.get("boundaries_min", PeriodScheme().boundaries_min)
        ),
        tz_offset_min=scheme_doc.get("tz_offset_min", 0),
    )
    defaults = ScenarioConfig()
    return ScenarioConfig(
        seed=int(doc.get("seed", 0)),
        start_date=dt.date.fromisoformat(doc.get("start_date", defaults.start_date.isoformat())),
        end_date=dt.date.fromisoformat(doc.get("end_date", defaults.end_date.isoformat())),
        inbound_means=tuple(doc.get("inbound_means", defaults.inbound_means)),
        outbound_means=tuple(doc.get("outbound_means", defaults.outbound_means)),
        noise=doc.get("noise", "none"),
        event_days=tuple(
            EventDay(dt.date.fromisoformat(e["date"]), float(e["multiplier"]))
            for e in doc.get("event_days", [])
        ),
        missing_days=tuple(dt.date.fromisoformat(d) for d in doc.get("missing_days", [])),
        zone_weights=(
            {int(k): float(v) for k, v in doc["zone_weights"].items()}
            if doc.get("zone_weights")
            else None
        ),
        hub=tuple(doc["hub"]) if doc.get("hub") else None,
        geofence_radius_m=float(doc.get("geofence_radius_m", 300.0)),
        scheme=scheme,
        grid_bbox=tuple(doc.get("grid_bbox", DEFAULT_GRID_BBOX)),
        grid_rows=int(doc.get("grid_rows", DEFAULT_GRID_ROWS)),
        grid_cols=int(doc.get("grid_cols", DEFAULT_GRID_COLS)),
    )


def load_scenario(path: Union[str, os.PathLike]) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def write_scenario(config: ScenarioConfig, out_dir: Union[str, os.PathLike]) -> dict[str, str]:
    """Generate and persist a scenario.

    Writes the probe CSV, zone GeoJSON, bus network, ground-truth tables,
    and a ready-to-run pipeline config pointing at them.  Returns the
    written paths keyed by artifact name.
    """
    data = generate(config)
    out = os.fspath(out_dir)
    os.makedirs(out, exist_ok=True)
    paths = {
        "probe_csv": os.path.join(out, "probe.csv"),
        "zones_geojson": os.path.join(out, "zones.geojson"),
        "network_json": os.path.join(out, "network.json"),
        "truth_flows": os.path.join(out, "truth_flows.csv"),
        "truth_zone_trips": os.path.join(out, "truth_zone_trips.csv"),
        "pipeline_config": os.path.join(out, "pipeline_config.json"),
    }
    with open(paths["probe_csv"], "w", encoding="utf-8", newline="") as fh:
        fh.write(data.probe_csv)
    save_zones_geojson(data.zones, paths["zones_geojson"])
    with open(paths["network_json"], "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(data.network), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(paths["truth_flows"], "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "period", "direction", "count"])
        for (day, period, direction) in sorted(data.truth_flows):
            writer.writerow([day.isoformat(), period, direction, data.truth_flows[(day, period, direction)]])
    with open(paths["truth_zone_trips"], "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["zone_id", "direction", "count"])
        for (zone_id, direction) in sorted(data.truth_zone_trips):
            writer.writerow([zone_id, direction, data.truth_zone_trips[(zone_id, direction)]])

    all_dates = config.dates()
    holdout = [d.isoformat() for d in all_dates[-2:]] if len(all_dates) >= 7 else []
    pipeline_config = {
        "probe_csv": "probe.csv",
        "zones_geojson": "zones.geojson",
        "network_json": "network.json",
        "hub": list(data.hub),
        "geofence_radius_m": config.geofence_radius_m,
        "period_scheme": scenario_to_dict(config)["period_scheme"],
        "start_date": config.start_date.isoformat(),
        "end_date": config.end_date.isoformat(),
        "holdout_dates": holdout,
        "missing_dates": [d.isoformat() for d in config.missing_days],
    }
    with open(paths["pipeline_config"], "w", encoding="utf-8") as fh:
        json.dump(pipeline_config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
