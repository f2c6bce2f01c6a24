"""Batch analysis pipeline and its on-disk workspace bundle.

``pipeline_run`` ingests the configured inputs once, computes every
analysis product, and persists them under a workspace directory.  The
bundle is keyed by a hash of the config plus input bytes: artifacts from
another hash are stale and get recomputed, never served.  Reruns with
unchanged inputs are byte-identical, so bundles can be diffed.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .analytics import (
    CongestionThresholds,
    FlowDirection,
    FlowSeries,
    ODMatrix,
    PeriodScheme,
    TimeWindow,
    accessibility,
    build_od_matrix,
    hub_flow_series,
    reliability,
    road_condition,
    write_flow_csv,
    write_od_csv,
)
from .probe import (
    CircleGeofence,
    Trip,
    build_tracks,
    detect_hub_events,
    extract_trips,
    parse_probe_csv,
)
from .stats import (
    DegreesOfFreedomError,
    RankDeficiencyError,
    RegressionFit,
    fit_dummy_regression,
    validate_mape,
)
from .transfer import BusNetwork, load_network
from .zones import ZoneIndex, ZoneSet, build_index, load_zones

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class PipelineInputError(ValueError):
    """A configured input is missing or unreadable."""


class StaleBundleError(RuntimeError):
    """A workspace artifact was computed under a different config hash."""


@dataclass
class PipelineConfig:
    probe_csv: Path
    zones_geojson: Path
    hub: tuple[float, float]
    network_json: Path | None = None
    geofence_radius_m: float = 300.0
    scheme: PeriodScheme = field(default_factory=PeriodScheme)
    start_date: dt.date | None = None
    end_date: dt.date | None = None
    holdout_dates: tuple[dt.date, ...] = ()
    train_dates: tuple[dt.date, ...] | None = None
    missing_dates: tuple[dt.date, ...] = ()
    include_degenerate_trips: bool = False
    min_samples: int = 5
    reliability_threshold: float = 0.5
    congestion_thresholds: CongestionThresholds = field(default_factory=CongestionThresholds)
    accessibility_budget_min: float = 45.0
    service_extent_q: float = 0.9
    mode: str = "taxi"
    workspace: Path | None = None

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Union[str, os.PathLike] = ".") -> "PipelineConfig":
        base = Path(base_dir)

        def path_of(key: str, required: bool) -> Path | None:
            raw = doc.get(key)
            if raw is None:
                if required:
                    raise PipelineInputError(f"config missing required path {key!r}")
                return None
            p = Path(raw)
            return p if p.is_absolute() else base / p

        def dates_of(key: str) -> tuple[dt.date, ...]:
            return tuple(dt.date.fromisoformat(d) for d in doc.get(key) or ())

        hub_raw = doc.get("hub")
        if not hub_raw or len(hub_raw) != 2:
            raise PipelineInputError("config missing hub [lon, lat]")
        scheme_doc = doc.get("period_scheme") or {}
        scheme = PeriodScheme(
            periods_per_day=scheme_doc.get("periods_per_day", 12),
            boundaries_min=tuple(scheme_doc.get("boundaries_min", PeriodScheme().boundaries_min)),
            tz_offset_min=scheme_doc.get("tz_offset_min", 0),
        )
        thresholds_doc = doc.get("congestion_thresholds") or {}
        thresholds = CongestionThresholds(
            free_min_kmh=thresholds_doc.get("free_min_kmh", 30.0),
            slow_min_kmh=thresholds_doc.get("slow_min_kmh", 15.0),
        )
        workspace_raw = doc.get("workspace")
        return cls(
            probe_csv=path_of("probe_csv", required=True),
            zones_geojson=path_of("zones_geojson", required=True),
            network_json=path_of("network_json", required=False),
            hub=(float(hub_raw[0]), float(hub_raw[1])),
            geofence_radius_m=float(doc.get("geofence_radius_m", 300.0)),
            scheme=scheme,
            start_date=dt.date.fromisoformat(doc["start_date"]) if doc.get("start_date") else None,
            end_date=dt.date.fromisoformat(doc["end_date"]) if doc.get("end_date") else None,
            holdout_dates=dates_of("holdout_dates"),
            train_dates=dates_of("train_dates") or None,
            missing_dates=dates_of("missing_dates"),
            include_degenerate_trips=bool(doc.get("include_degenerate_trips", False)),
            min_samples=int(doc.get("min_samples", 5)),
            reliability_threshold=float(doc.get("reliability_threshold", 0.5)),
            congestion_thresholds=thresholds,
            accessibility_budget_min=float(doc.get("accessibility_budget_min", 45.0)),
            service_extent_q=float(doc.get("service_extent_q", 0.9)),
            mode=str(doc.get("mode", "taxi")),
            workspace=(Path(workspace_raw) if Path(workspace_raw).is_absolute() else base / workspace_raw)
            if workspace_raw
            else None,
        )

    @classmethod
    def from_json(cls, path: Union[str, os.PathLike]) -> "PipelineConfig":
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise PipelineInputError(f"config file not found: {path}")
        except json.JSONDecodeError as err:
            raise PipelineInputError(f"config file {path} is not valid JSON: {err}")
        return cls.from_dict(doc, base_dir=path.parent)

    def canonical_dict(self) -> dict:
        """Hash-stable view of the config; workspace location excluded."""
        return {
            "probe_csv": str(self.probe_csv),
            "zones_geojson": str(self.zones_geojson),
            "network_json": str(self.network_json) if self.network_json else None,
            "hub": list(self.hub),
            "geofence_radius_m": self.geofence_radius_m,
            "period_scheme": {
                "periods_per_day": self.scheme.periods_per_day,
                "boundaries_min": list(self.scheme.boundaries_min),
                "tz_offset_min": self.scheme.tz_offset_min,
            },
            "start_date": self.start_date.isoformat() if self.start_date else None,
            "end_date": self.end_date.isoformat() if self.end_date else None,
            "holdout_dates": [d.isoformat() for d in self.holdout_dates],
            "train_dates": [d.isoformat() for d in self.train_dates] if self.train_dates else None,
            "missing_dates": [d.isoformat() for d in self.missing_dates],
            "include_degenerate_trips": self.include_degenerate_trips,
            "min_samples": self.min_samples,
            "reliability_threshold": self.reliability_threshold,
            "congestion_thresholds": {
                "free_min_kmh": self.congestion_thresholds.free_min_kmh,
                "slow_min_kmh": self.congestion_thresholds.slow_min_kmh,
            },
            "accessibility_budget_min": self.accessibility_budget_min,
            "service_extent_q": self.service_extent_q,
            "mode": self.mode,
        }


def _hash_config(config: PipelineConfig) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(config.canonical_dict(), sort_keys=True).encode("utf-8"))
    for path in (config.probe_csv, config.zones_geojson, config.network_json):
        h.update(b"\x00")
        if path is None:
            h.update(b"-")
            continue
        try:
            h.update(Path(path).read_bytes())
        except OSError as err:
            raise PipelineInputError(f"cannot read input file {path}: {err}")
    return h.hexdigest()


def _dump_json(path: Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _trip_rows(trips: list[Trip]) -> list[list]:
    rows = []
    for t in trips:
        rows.append([
            t.vehicle_id,
            repr(t.pickup_time),
            repr(t.dropoff_time),
            repr(t.pickup_point[0]),
            repr(t.pickup_point[1]),
            repr(t.dropoff_point[0]),
            repr(t.dropoff_point[1]),
            "" if t.pickup_zone is None else t.pickup_zone,
            "" if t.dropoff_zone is None else t.dropoff_zone,
            int(t.truncated_start),
            int(t.truncated_end),
            t.mode,
        ])
    return rows


TRIP_CSV_HEADER = [
    "vehicle_id", "pickup_time", "dropoff_time",
    "pickup_lon", "pickup_lat", "dropoff_lon", "dropoff_lat",
    "pickup_zone", "dropoff_zone", "truncated_start", "truncated_end", "mode",
]


def _read_trips_csv(path: Path) -> list[Trip]:
    trips = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            trips.append(
                Trip(
                    vehicle_id=row["vehicle_id"],
                    pickup_time=float(row["pickup_time"]),
                    dropoff_time=float(row["dropoff_time"]),
                    pickup_point=(float(row["pickup_lon"]), float(row["pickup_lat"])),
                    dropoff_point=(float(row["dropoff_lon"]), float(row["dropoff_lat"])),
                    pickup_zone=int(row["pickup_zone"]) if row["pickup_zone"] else None,
                    dropoff_zone=int(row["dropoff_zone"]) if row["dropoff_zone"] else None,
                    truncated_start=row["truncated_start"] == "1",
                    truncated_end=row["truncated_end"] == "1",
                    mode=row["mode"],
                )
            )
    return trips


def _read_flow_csv(path: Path, direction: FlowDirection, periods_per_day: int) -> FlowSeries:
    from .analytics import FlowEntry

    entries = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            entries.append(
                FlowEntry(dt.date.fromisoformat(row["date"]), int(row["period"]), int(row["count"]))
            )
    return FlowSeries(direction=direction, periods_per_day=periods_per_day, entries=entries)


@dataclass
class AnalysisBundle:
    """In-memory view of a computed workspace."""

    workspace: Path
    config: PipelineConfig
    config_hash: str
    manifest: dict
    zones: ZoneSet
    index: ZoneIndex
    trips: list[Trip]
    flows: dict[FlowDirection, FlowSeries]
    fit_reports: dict[str, dict]
    od: ODMatrix
    hub_zone_id: int | None
    accessibility_doc: dict
    reliability_doc: dict
    congestion_rows: list[dict]
    extent_doc: dict
    network: BusNetwork | None

    def fit(self, direction: FlowDirection) -> RegressionFit:
        report = self.fit_reports[direction.value]
        if "error" in report:
            raise RuntimeError(f"no usable {direction.value} fit: {report['error']}")
        return RegressionFit.from_report_dict(report)


def _compute_window(config: PipelineConfig, start: dt.date, end: dt.date) -> TimeWindow:
    return TimeWindow(
        config.scheme.day_window(start).start,
        config.scheme.day_window(end).end,
    )


def pipeline_run(
    config: Union[PipelineConfig, str, os.PathLike],
    workspace: Union[str, os.PathLike, None] = None,
    force: bool = False,
) -> AnalysisBundle:
    """Run the batch pipeline and persist an analysis bundle.

    ``config`` is a PipelineConfig or a path to its JSON form.  A bundle
    already computed under the same config hash is reused unless
    ``force``.  Model-fit failures (rank deficiency, too few rows) leave
    an error entry in the fit artifact instead of aborting the run.
    """
    if not isinstance(config, PipelineConfig):
        config = PipelineConfig.from_json(config)
    ws = Path(workspace) if workspace is not None else config.workspace
    if ws is None:
        raise PipelineInputError("no workspace directory configured")
    ws.mkdir(parents=True, exist_ok=True)

    for label, path in (("probe_csv", config.probe_csv), ("zones_geojson", config.zones_geojson), ("network_json", config.network_json)):
        if path is not None and not Path(path).is_file():
            raise PipelineInputError(f"{label} input not found: {path}")

    config_hash = _hash_config(config)
    manifest_path = ws / MANIFEST_NAME
    if manifest_path.is_file() and not force:
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            manifest = None
        if manifest and manifest.get("config_hash") == config_hash and all(
            (ws / name).is_file() for name in manifest.get("artifacts", [])
        ):
            logger.info("workspace %s is current for hash %s, reusing", ws, config_hash[:12])
            return load_bundle(ws)

    zones = load_zones(config.zones_geojson)
    index = build_index(zones)
    records, rejects = parse_probe_csv(config.probe_csv)
    tracks = build_tracks(records)
    geofence = CircleGeofence(center=config.hub, radius_m=config.geofence_radius_m)
    trips: list[Trip] = []
    events = []
    for track in tracks:
        trips.extend(extract_trips(track))
        events.extend(detect_hub_events(track, geofence))
    from .zones import assign_trip_zones

    trips = assign_trip_zones(trips, index)

    start, end = config.start_date, config.end_date
    if start is None or end is None:
        stamps = [e.time for e in events] or [t.pickup_time for t in trips] or [r.timestamp for r in records]
        if not stamps:
            raise PipelineInputError("no data to infer a date range from; set start_date/end_date")
        inferred_start = config.scheme.date_of(min(stamps))
        inferred_end = config.scheme.date_of(max(stamps))
        start = start or inferred_start
        end = end or inferred_end
    if end < start:
        raise PipelineInputError(f"end_date {end} before start_date {start}")

    flows = {
        direction: hub_flow_series(events, config.scheme, start, end, direction)
        for direction in (FlowDirection.INBOUND, FlowDirection.OUTBOUND)
    }

    window = _compute_window(config, start, end)
    od = build_od_matrix(trips, zones, window, include_degenerate=config.include_degenerate_trips)
    hub_zone_id = index.locate(*config.hub)

    all_dates = []
    day = start
    while day <= end:
        all_dates.append(day)
        day += dt.timedelta(days=1)
    excluded = set(config.holdout_dates) | set(config.missing_dates)
    train_dates = list(config.train_dates) if config.train_dates else [d for d in all_dates if d not in excluded]

    fit_reports: dict[str, dict] = {}
    for direction in (FlowDirection.INBOUND, FlowDirection.OUTBOUND):
        report: dict
        try:
            fit = fit_dummy_regression(flows[direction].subset(train_dates))
            report = fit.to_report_dict()
            if config.holdout_dates:
                try:
                    validation = validate_mape(fit, flows[direction].subset(config.holdout_dates))
                    report["validation"] = {
                        "max_error_pct": validation.max_error_pct,
                        "min_error_pct": validation.min_error_pct,
                        "mean_error_pct": validation.mean_error_pct,
                        "samples": validation.samples,
                        "excluded_zero_actuals": validation.excluded_zero_actuals,
                    }
                except (ValueError, KeyError) as err:
                    report["validation"] = {"error": str(err)}
        except (RankDeficiencyError, DegreesOfFreedomError, ValueError, KeyError) as err:
            logger.warning("%s fit failed: %s", direction.value, err)
            report = {"error": str(err)}
        report["config_hash"] = config_hash
        fit_reports[direction.value] = report

    hub_departures = [
        t for t in trips if geofence.contains(t.pickup_point[0], t.pickup_point[1])
    ]
    access = accessibility(
        hub_departures,
        zones,
        budget_minutes=config.accessibility_budget_min,
        min_samples=config.min_samples,
        include_degenerate=config.include_degenerate_trips,
    )
    relia = reliability(
        hub_departures,
        zones,
        min_samples=config.min_samples,
        threshold=config.reliability_threshold,
        include_degenerate=config.include_degenerate_trips,
    )

    by_date: dict[dt.date, list] = {}
    for rec in records:
        by_date.setdefault(config.scheme.date_of(rec.timestamp), []).append(rec)
    congestion_rows = []
    for day in sorted(by_date):
        if not start <= day <= end:
            continue
        grid = road_condition(by_date[day], index, config.scheme, day, config.congestion_thresholds)
        for key in sorted(grid.cells):
            cell = grid.cells[key]
            if cell.samples == 0:
                continue
            congestion_rows.append({
                "date": day.isoformat(),
                "zone_id": cell.zone_id,
                "period": cell.period,
                "samples": cell.samples,
                "mean_speed_kmh": cell.mean_speed_kmh,
            })

    try:
        from .analytics import compute_service_extent

        extent_doc = {
            "q": config.service_extent_q,
            "radius_km": compute_service_extent(od, zones, config.hub, config.service_extent_q),
            "config_hash": config_hash,
        }
    except ValueError as err:
        extent_doc = {"q": config.service_extent_q, "error": str(err), "config_hash": config_hash}

    # Persist everything with stable ordering.
    zones_bytes = Path(config.zones_geojson).read_bytes()
    (ws / "zones.geojson").write_bytes(zones_bytes)
    network = None
    if config.network_json is not None:
        network = load_network(config.network_json)
        (ws / "network.json").write_bytes(Path(config.network_json).read_bytes())

    with open(ws / "trips.csv", "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIP_CSV_HEADER)
        writer.writerows(_trip_rows(trips))
    with open(ws / "hub_events.csv", "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["vehicle_id", "time", "direction"])
        for ev in events:
            writer.writerow([ev.vehicle_id, repr(ev.time), ev.direction.value])
    with open(ws / "rejects.csv", "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["line_number", "reason", "raw"])
        for rej in rejects.entries:
            writer.writerow([rej.line_number, rej.reason, rej.raw])

    write_flow_csv(flows[FlowDirection.INBOUND], ws / "flows_inbound.csv")
    write_flow_csv(flows[FlowDirection.OUTBOUND], ws / "flows_outbound.csv")
    write_od_csv(od, ws / "od_matrix.csv")
    _dump_json(ws / "od_meta.json", {
        "window_start": od.window.start,
        "window_end": od.window.end,
        "unassigned": od.unassigned,
        "total_trips": od.total_trips,
        "hub_zone_id": hub_zone_id,
        "mode": config.mode,
        "config_hash": config_hash,
    })
    _dump_json(ws / "fit_inbound.json", fit_reports["inbound"])
    _dump_json(ws / "fit_outbound.json", fit_reports["outbound"])
    _dump_json(ws / "accessibility.json", {
        "config_hash": config_hash,
        "budget_minutes": access.budget_minutes,
        "min_samples": access.min_samples,
        "zones": [
            {
                "zone_id": z.zone_id,
                "samples": z.samples,
                "mean_minutes": z.mean_minutes,
                "reachable": z.reachable,
            }
            for z in (access.zones[zid] for zid in sorted(access.zones))
        ],
    })
    _dump_json(ws / "reliability.json", {
        "config_hash": config_hash,
        "threshold": relia.threshold,
        "min_samples": relia.min_samples,
        "zones": [
            {
                "zone_id": z.zone_id,
                "samples": z.samples,
                "median_minutes": z.median_minutes,
                "p10_minutes": z.p10_minutes,
                "p90_minutes": z.p90_minutes,
                "spread_index": None if z.spread_index is None else z.spread_index,
                "classification": z.classification,
            }
            for z in (relia.zones[zid] for zid in sorted(relia.zones))
        ],
    })
    with open(ws / "congestion.csv", "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "zone_id", "period", "samples", "mean_speed_kmh"])
        for row in congestion_rows:
            writer.writerow([row["date"], row["zone_id"], row["period"], row["samples"], repr(row["mean_speed_kmh"])])
    _dump_json(ws / "extent.json", extent_doc)

    resolved_config = config.canonical_dict()
    resolved_config["config_hash"] = config_hash
    _dump_json(ws / "config.json", resolved_config)

    artifacts = [
        "config.json", "zones.geojson", "trips.csv", "hub_events.csv", "rejects.csv",
        "flows_inbound.csv", "flows_outbound.csv", "od_matrix.csv", "od_meta.json",
        "fit_inbound.json", "fit_outbound.json", "accessibility.json",
        "reliability.json", "congestion.csv", "extent.json",
    ]
    if network is not None:
        artifacts.append("network.json")
    manifest = {
        "config_hash": config_hash,
        "artifacts": sorted(artifacts),
        "counts": {
            "records": len(records),
            "rejects": len(rejects),
            "tracks": len(tracks),
            "trips": len(trips),
            "hub_events": len(events),
            "od_total_trips": od.total_trips,
            "od_unassigned": od.unassigned,
        },
        "date_range": {"start": start.isoformat(), "end": end.isoformat()},
        "train_dates": [d.isoformat() for d in train_dates],
        "holdout_dates": [d.isoformat() for d in config.holdout_dates],
    }
    _dump_json(manifest_path, manifest)
    logger.info(
        "pipeline wrote %d artifacts to %s (records=%d rejects=%d trips=%d events=%d)",
        len(artifacts), ws, len(records), len(rejects), len(trips), len(events),
    )
    return load_bundle(ws)


def load_bundle(workspace: Union[str, os.PathLike]) -> AnalysisBundle:
    """Load a workspace written by pipeline_run, verifying hash consistency."""
    ws = Path(workspace)
    manifest_path = ws / MANIFEST_NAME
    if not manifest_path.is_file():
        raise PipelineInputError(f"no manifest in workspace {ws}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    config_hash = manifest["config_hash"]

    config_doc = json.loads((ws / "config.json").read_text(encoding="utf-8"))
    if config_doc.get("config_hash") != config_hash:
        raise StaleBundleError("config.json hash does not match manifest")
    # Paths in the stored config are informational; inputs are not re-read.
    scheme_doc = config_doc["period_scheme"]
    config = PipelineConfig(
        probe_csv=Path(config_doc["probe_csv"]),
        zones_geojson=Path(config_doc["zones_geojson"]),
        network_json=Path(config_doc["network_json"]) if config_doc.get("network_json") else None,
        hub=tuple(config_doc["hub"]),
        geofence_radius_m=config_doc["geofence_radius_m"],
        scheme=PeriodScheme(
            periods_per_day=scheme_doc["periods_per_day"],
            boundaries_min=tuple(scheme_doc["boundaries_min"]),
            tz_offset_min=scheme_doc["tz_offset_min"],
        ),
        start_date=dt.date.fromisoformat(config_doc["start_date"]) if config_doc.get("start_date") else None,
        end_date=dt.date.fromisoformat(config_doc["end_date"]) if config_doc.get("end_date") else None,
        holdout_dates=tuple(dt.date.fromisoformat(d) for d in config_doc.get("holdout_dates") or ()),
        train_dates=tuple(dt.date.fromisoformat(d) for d in config_doc["train_dates"]) if config_doc.get("train_dates") else None,
        missing_dates=tuple(dt.date.fromisoformat(d) for d in config_doc.get("missing_dates") or ()),
        include_degenerate_trips=config_doc["include_degenerate_trips"],
        min_samples=config_doc["min_samples"],
        reliability_threshold=config_doc["reliability_threshold"],
        congestion_thresholds=CongestionThresholds(
            free_min_kmh=config_doc["congestion_thresholds"]["free_min_kmh"],
            slow_min_kmh=config_doc["congestion_thresholds"]["slow_min_kmh"],
        ),
        accessibility_budget_min=config_doc["accessibility_budget_min"],
        service_extent_q=config_doc["service_extent_q"],
        mode=config_doc["mode"],
        workspace=ws,
    )

    zones = load_zones(ws / "zones.geojson")
    index = build_index(zones)
    trips = _read_trips_csv(ws / "trips.csv")
    flows = {
        FlowDirection.INBOUND: _read_flow_csv(ws / "flows_inbound.csv", FlowDirection.INBOUND, config.scheme.periods_per_day),
        FlowDirection.OUTBOUND: _read_flow_csv(ws / "flows_outbound.csv", FlowDirection.OUTBOUND, config.scheme.periods_per_day),
    }
    fit_reports = {}
    for direction in ("inbound", "outbound"):
        doc = json.loads((ws / f"fit_{direction}.json").read_text(encoding="utf-8"))
        if doc.get("config_hash") != config_hash:
            raise StaleBundleError(f"fit_{direction}.json hash does not match manifest")
        fit_reports[direction] = doc

    od_meta = json.loads((ws / "od_meta.json").read_text(encoding="utf-8"))
    if od_meta.get("config_hash") != config_hash:
        raise StaleBundleError("od_meta.json hash does not match manifest")
    window = TimeWindow(od_meta["window_start"], od_meta["window_end"])
    counts: dict[tuple[int, int], int] = {}
    with open(ws / "od_matrix.csv", "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            counts[(int(row["origin_zone"]), int(row["dest_zone"]))] = int(row["count"])
    od = ODMatrix(window=window, counts=counts, unassigned=od_meta["unassigned"])

    accessibility_doc = json.loads((ws / "accessibility.json").read_text(encoding="utf-8"))
    reliability_doc = json.loads((ws / "reliability.json").read_text(encoding="utf-8"))
    extent_doc = json.loads((ws / "extent.json").read_text(encoding="utf-8"))
    for name, doc in (("accessibility.json", accessibility_doc), ("reliability.json", reliability_doc), ("extent.json", extent_doc)):
        if doc.get("config_hash") != config_hash:
            raise StaleBundleError(f"{name} hash does not match manifest")

    congestion_rows = []
    with open(ws / "congestion.csv", "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            congestion_rows.append({
                "date": row["date"],
                "zone_id": int(row["zone_id"]),
                "period": int(row["period"]),
                "samples": int(row["samples"]),
                "mean_speed_kmh": float(row["mean_speed_kmh"]),
            })

    network = None
    if (ws / "network.json").is_file():
        network = load_network(ws / "network.json")

    return AnalysisBundle(
        workspace=ws,
        config=config,
        config_hash=config_hash,
        manifest=manifest,
        zones=zones,
        index=index,
        trips=trips,
        flows=flows,
        fit_reports=fit_reports,
        od=od,
        hub_zone_id=od_meta.get("hub_zone_id"),
        accessibility_doc=accessibility_doc,
        reliability_doc=reliability_doc,
        congestion_rows=congestion_rows,
        extent_doc=extent_doc,
        network=network,
    )
