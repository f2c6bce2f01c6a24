"""Read-only HTTP JSON service over a computed analysis bundle.

The service never recomputes models or mutates the workspace: it answers
from bundle artifacts, re-aggregating cheap views (windowed OD counts,
budget-dependent reachability) from the cached trip table.  Every
response carries the bundle's config hash so clients can detect staleness.
"""

from __future__ import annotations

import datetime as dt
import math
import os
from typing import Union

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analytics import (
    FlowDirection,
    TimeWindow,
    build_od_matrix,
    compute_service_extent,
)
from .pipeline import AnalysisBundle, load_bundle
from .stats import RegressionFit
from .transfer import UnknownStationError, find_plans


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def _bad(code: str, message: str) -> ApiError:
    return ApiError(400, code, message)


def _parse_date(raw: str, name: str) -> dt.date:
    try:
        return dt.date.fromisoformat(raw)
    except ValueError:
        raise _bad("bad_date", f"{name} must be YYYY-MM-DD, got {raw!r}")


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise _bad("bad_int", f"{name} must be an integer, got {raw!r}")


def _parse_float(raw: str, name: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise _bad("bad_number", f"{name} must be a number, got {raw!r}")
    if not math.isfinite(value):
        raise _bad("bad_number", f"{name} must be finite, got {raw!r}")
    return value


def create_app(workspace: Union[str, os.PathLike, AnalysisBundle]) -> FastAPI:
    bundle = workspace if isinstance(workspace, AnalysisBundle) else load_bundle(workspace)
    app = FastAPI(title="hubflow", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )
    scheme = bundle.config.scheme

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, err: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=err.status,
            content={"error": {"code": err.code, "message": err.message}},
        )

    def payload(**body) -> dict:
        return {"config_hash": bundle.config_hash, **body}

    def parse_direction(raw: str) -> FlowDirection:
        try:
            return FlowDirection(raw)
        except ValueError:
            raise _bad("bad_direction", f"direction must be 'inbound' or 'outbound', got {raw!r}")

    def fit_for(direction: FlowDirection) -> RegressionFit:
        report = bundle.fit_reports[direction.value]
        if "error" in report:
            raise ApiError(404, "no_fit", f"no usable {direction.value} fit: {report['error']}")
        return RegressionFit.from_report_dict(report)

    @app.get("/zones")
    def zones_endpoint() -> dict:
        return payload(
            hub_zone_id=bundle.hub_zone_id,
            hub=list(bundle.config.hub),
            zones=[
                {
                    "zone_id": z.zone_id,
                    "name": z.name,
                    "district": z.district,
                    "centroid": list(z.centroid),
                    "ring": [list(v) for v in z.ring],
                }
                for z in bundle.zones
            ],
        )

    @app.get("/od")
    def od_endpoint(window: str | None = None, mode: str = "taxi") -> dict:
        if mode != bundle.config.mode:
            raise _bad("unsupported_mode", f"mode {mode!r} not available, bundle holds {bundle.config.mode!r}")
        if window is None:
            matrix = bundle.od
        else:
            if ".." in window:
                start_raw, _, end_raw = window.partition("..")
                start = _parse_date(start_raw, "window start")
                end = _parse_date(end_raw, "window end")
            else:
                start = end = _parse_date(window, "window")
            if end < start:
                raise _bad("bad_window", f"window end {end} before start {start}")
            tw = TimeWindow(scheme.day_window(start).start, scheme.day_window(end).end)
            matrix = build_od_matrix(
                bundle.trips,
                bundle.zones,
                tw,
                include_degenerate=bundle.config.include_degenerate_trips,
            )
        pairs = [
            {"origin": origin, "dest": dest, "count": matrix.counts[(origin, dest)]}
            for origin, dest in sorted(matrix.counts)
        ]
        return payload(
            window={"start": matrix.window.start, "end": matrix.window.end},
            mode=bundle.config.mode,
            hub_zone_id=bundle.hub_zone_id,
            counts=pairs,
            unassigned=matrix.unassigned,
            total_trips=matrix.total_trips,
            conserved=sum(p["count"] for p in pairs) + matrix.unassigned == matrix.total_trips,
        )

    @app.get("/flows")
    def flows_endpoint(
        direction: str,
        date_from: str | None = Query(default=None, alias="from"),
        date_to: str | None = Query(default=None, alias="to"),
    ) -> dict:
        flow_dir = parse_direction(direction)
        series = bundle.flows[flow_dir]
        dates = series.dates()
        if not dates:
            return payload(direction=flow_dir.value, entries=[])
        start = _parse_date(date_from, "from") if date_from else dates[0]
        end = _parse_date(date_to, "to") if date_to else dates[-1]
        if end < start:
            raise _bad("bad_window", f"'to' {end} before 'from' {start}")
        entries = [
            {"date": e.date.isoformat(), "period": e.period, "count": e.count}
            for e in series.entries
            if start <= e.date <= end
        ]
        return payload(direction=flow_dir.value, periods_per_day=series.periods_per_day, entries=entries)

    @app.get("/forecast")
    def forecast_endpoint(direction: str = "outbound", period: str | None = None) -> dict:
        flow_dir = parse_direction(direction)
        fit = fit_for(flow_dir)
        if period is None:
            raise _bad("missing_period", "period query parameter is required")
        j = _parse_int(period, "period")
        if not 1 <= j <= fit.n_periods:
            raise _bad("bad_period", f"period must be in 1..{fit.n_periods}, got {j}")
        return payload(direction=flow_dir.value, period=j, prediction=fit.predict(j))

    @app.get("/forecast/report")
    def forecast_report_endpoint(direction: str = "outbound") -> dict:
        flow_dir = parse_direction(direction)
        report = bundle.fit_reports[flow_dir.value]
        if "error" in report:
            raise ApiError(404, "no_fit", f"no usable {flow_dir.value} fit: {report['error']}")
        return payload(direction=flow_dir.value, report={k: v for k, v in report.items() if k != "config_hash"})

    @app.get("/validation")
    def validation_endpoint(direction: str = "outbound") -> dict:
        flow_dir = parse_direction(direction)
        report = bundle.fit_reports[flow_dir.value]
        if "error" in report:
            raise ApiError(404, "no_fit", f"no usable {flow_dir.value} fit: {report['error']}")
        validation = report.get("validation")
        if validation is None or "error" in validation:
            detail = (validation or {}).get("error", "no holdout dates configured")
            raise ApiError(404, "no_validation", f"no validation block: {detail}")
        return payload(direction=flow_dir.value, validation=validation)

    @app.get("/accessibility")
    def accessibility_endpoint(budget_min: str | None = None, min_samples: str | None = None) -> dict:
        budget = _parse_float(budget_min, "budget_min") if budget_min is not None else bundle.accessibility_doc["budget_minutes"]
        if budget <= 0:
            raise _bad("bad_budget", f"budget_min must be positive, got {budget}")
        min_n = _parse_int(min_samples, "min_samples") if min_samples is not None else bundle.accessibility_doc["min_samples"]
        if min_n < 1:
            raise _bad("bad_min_samples", f"min_samples must be at least 1, got {min_n}")
        zones_out = []
        for z in bundle.accessibility_doc["zones"]:
            reachable = (
                z["samples"] >= min_n
                and z["mean_minutes"] is not None
                and z["mean_minutes"] <= budget
            )
            zones_out.append({**{k: z[k] for k in ("zone_id", "samples", "mean_minutes")}, "reachable": reachable})
        return payload(budget_minutes=budget, min_samples=min_n, zones=zones_out)

    @app.get("/reliability")
    def reliability_endpoint() -> dict:
        doc = bundle.reliability_doc
        return payload(
            threshold=doc["threshold"],
            min_samples=doc["min_samples"],
            zones=doc["zones"],
        )

    @app.get("/congestion")
    def congestion_endpoint(date: str, period: str) -> dict:
        day = _parse_date(date, "date")
        j = _parse_int(period, "period")
        if not 1 <= j <= scheme.periods_per_day:
            raise _bad("bad_period", f"period must be in 1..{scheme.periods_per_day}, got {j}")
        want = day.isoformat()
        observed = {
            row["zone_id"]: row
            for row in bundle.congestion_rows
            if row["date"] == want and row["period"] == j
        }
        thresholds = bundle.config.congestion_thresholds
        zones_out = []
        for z in bundle.zones:
            row = observed.get(z.zone_id)
            mean = row["mean_speed_kmh"] if row else None
            zones_out.append({
                "zone_id": z.zone_id,
                "samples": row["samples"] if row else 0,
                "mean_speed_kmh": mean,
                "level": thresholds.classify(mean),
            })
        return payload(
            date=want,
            period=j,
            thresholds={"free_min_kmh": thresholds.free_min_kmh, "slow_min_kmh": thresholds.slow_min_kmh},
            zones=zones_out,
        )

    @app.get("/transfer")
    def transfer_endpoint(
        from_station: str = Query(alias="from"),
        to_station: str = Query(alias="to"),
        max_transfers: str | None = None,
    ) -> dict:
        if bundle.network is None:
            raise ApiError(404, "no_network", "bundle has no bus network")
        limit = _parse_int(max_transfers, "max_transfers") if max_transfers is not None else 2
        if limit < 0:
            raise _bad("bad_max_transfers", f"max_transfers must be nonnegative, got {limit}")
        if from_station == to_station:
            raise _bad("same_station", "origin and destination are the same station")
        try:
            plans = find_plans(bundle.network, from_station, to_station, max_transfers=limit)
        except UnknownStationError as err:
            raise ApiError(404, "unknown_station", str(err))
        return payload(
            origin=from_station,
            destination=to_station,
            max_transfers=limit,
            plans=[
                {
                    "num_transfers": plan.num_transfers,
                    "total_stops": plan.total_stops,
                    "stations": plan.stations(),
                    "legs": [
                        {"route": leg.route_id, "board": leg.board, "alight": leg.alight, "hops": leg.hops}
                        for leg in plan.legs
                    ],
                }
                for plan in plans
            ],
        )

    @app.get("/service-extent")
    def service_extent_endpoint(q: str | None = None) -> dict:
        if q is None:
            doc = bundle.extent_doc
            if "error" in doc:
                raise ApiError(404, "no_volume", doc["error"])
            return payload(q=doc["q"], radius_km=doc["radius_km"])
        q_val = _parse_float(q, "q")
        if not 0 < q_val <= 1:
            raise _bad("bad_q", f"q must be in (0, 1], got {q_val}")
        try:
            radius = compute_service_extent(bundle.od, bundle.zones, bundle.config.hub, q_val)
        except ValueError as err:
            raise ApiError(404, "no_volume", str(err))
        return payload(q=q_val, radius_km=radius)

    return app


def serve(workspace: Union[str, os.PathLike], bind: str = "127.0.0.1:8000") -> None:
    """Blocking entry point: serve a workspace bundle over HTTP."""
    import uvicorn

    host, _, port_raw = bind.partition(":")
    port = int(port_raw) if port_raw else 8000
    uvicorn.run(create_app(workspace), host=host or "127.0.0.1", port=port, log_level="info")
