"""Bus network model and transfer planning.

The network is a station/route bipartite structure.  A plan is a chain
of legs, each riding one route between two of its stops; plans are
simple (no station revisited at a leg boundary) and ranked by transfer
count, then ridden hops, then the route-id sequence, so results are
deterministic for a given network.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import IO, Union


class NetworkValidationError(ValueError):
    """Raised when a bus network file is structurally broken."""


class UnknownStationError(LookupError):
    def __init__(self, station_id: str) -> None:
        self.station_id = station_id
        super().__init__(f"unknown station {station_id!r}")


@dataclass(frozen=True)
class Station:
    station_id: str
    name: str
    lon: float
    lat: float


@dataclass(frozen=True)
class BusRoute:
    route_id: str
    stops: tuple[str, ...]
    one_way: bool = False


@dataclass
class BusNetwork:
    stations: dict[str, Station]
    routes: dict[str, BusRoute]

    def __post_init__(self) -> None:
        self.routes_by_station: dict[str, list[str]] = {}
        for route_id in sorted(self.routes):
            for stop in self.routes[route_id].stops:
                lst = self.routes_by_station.setdefault(stop, [])
                if route_id not in lst:
                    lst.append(route_id)


@dataclass(frozen=True)
class TransferLeg:
    route_id: str
    board: str
    alight: str
    hops: int  # inter-station hops ridden on this leg


@dataclass(frozen=True)
class TransferPlan:
    legs: tuple[TransferLeg, ...]

    @property
    def num_transfers(self) -> int:
        return len(self.legs) - 1

    @property
    def total_stops(self) -> int:
        return sum(leg.hops for leg in self.legs)

    @property
    def route_sequence(self) -> tuple[str, ...]:
        return tuple(leg.route_id for leg in self.legs)

    def stations(self) -> list[str]:
        """Boundary stations: origin, each transfer point, destination."""
        out = [self.legs[0].board]
        out.extend(leg.alight for leg in self.legs)
        return out


def _plan_sort_key(plan: TransferPlan) -> tuple[int, int, tuple[str, ...]]:
    return (plan.num_transfers, plan.total_stops, plan.route_sequence)


def load_network(source: Union[str, os.PathLike, IO]) -> BusNetwork:
    """Load a bus network from JSON: {"stations": [...], "routes": [...]}.

    Validates id uniqueness, that every route stop resolves to a station,
    and that routes have at least two stops with no immediate repeats.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    stations: dict[str, Station] = {}
    for entry in doc.get("stations", []):
        sid = str(entry["id"])
        if sid in stations:
            raise NetworkValidationError(f"duplicate station id {sid!r}")
        stations[sid] = Station(
            station_id=sid,
            name=str(entry.get("name", sid)),
            lon=float(entry["lon"]),
            lat=float(entry["lat"]),
        )
    routes: dict[str, BusRoute] = {}
    for entry in doc.get("routes", []):
        rid = str(entry["id"])
        if rid in routes:
            raise NetworkValidationError(f"duplicate route id {rid!r}")
        stops = tuple(str(s) for s in entry.get("stops", []))
        if len(stops) < 2:
            raise NetworkValidationError(f"route {rid!r} has fewer than 2 stops")
        for stop in stops:
            if stop not in stations:
                raise NetworkValidationError(f"route {rid!r} references unknown station {stop!r}")
        for i in range(len(stops) - 1):
            if stops[i] == stops[i + 1]:
                raise NetworkValidationError(f"route {rid!r} repeats stop {stops[i]!r} consecutively")
        routes[rid] = BusRoute(route_id=rid, stops=stops, one_way=bool(entry.get("one_way", False)))
    return BusNetwork(stations=stations, routes=routes)


def network_to_dict(net: BusNetwork) -> dict:
    return {
        "stations": [
            {"id": s.station_id, "name": s.name, "lon": s.lon, "lat": s.lat}
            for s in sorted(net.stations.values(), key=lambda s: s.station_id)
        ],
        "routes": [
            {"id": r.route_id, "stops": list(r.stops), "one_way": r.one_way}
            for r in sorted(net.routes.values(), key=lambda r: r.route_id)
        ],
    }


def _leg_hops(route: BusRoute, board: str, alight: str) -> int | None:
    """Fewest hops to ride this route from board to alight, or None.

    Bidirectional routes may be ridden either way; one-way routes only in
    stop order.  Repeated (non-consecutive) stops take the closest pair.
    """
    board_idx = [i for i, s in enumerate(route.stops) if s == board]
    alight_idx = [i for i, s in enumerate(route.stops) if s == alight]
    if not board_idx or not alight_idx:
        return None
    best: int | None = None
    for i in board_idx:
        for j in alight_idx:
            if route.one_way:
                if j <= i:
                    continue
                hops = j - i
            else:
                hops = abs(j - i)
                if hops == 0:
                    continue
            if best is None or hops < best:
                best = hops
    return best


def find_plans(
    net: BusNetwork,
    origin: str,
    dest: str,
    max_transfers: int = 2,
    max_plans: int = 10,
) -> list[TransferPlan]:
    """All simple plans from origin to dest within the transfer budget,
    best ``max_plans`` of them in ranked order.

    The search layers by leg count, so a returned head of the list always
    has the minimum achievable number of transfers.  Boarding the same
    route twice in a row is never useful on a simple plan and is skipped.
    """
    if origin not in net.stations:
        raise UnknownStationError(origin)
    if dest not in net.stations:
        raise UnknownStationError(dest)
    if origin == dest:
        raise ValueError("origin and destination are the same station")
    if max_transfers < 0:
        raise ValueError(f"max_transfers must be nonnegative, got {max_transfers}")
    if max_plans < 1:
        raise ValueError(f"max_plans must be positive, got {max_plans}")

    max_legs = max_transfers + 1
    plans: list[TransferPlan] = []

    def extend(station: str, visited: set[str], legs: list[TransferLeg]) -> None:
        if station == dest:
            plans.append(TransferPlan(legs=tuple(legs)))
            return
        if len(legs) == max_legs:
            return
        last_route = legs[-1].route_id if legs else None
        for route_id in net.routes_by_station.get(station, []):
            if route_id == last_route:
                continue
            route = net.routes[route_id]
            for alight in dict.fromkeys(route.stops):
                if alight == station or alight in visited:
                    continue
                hops = _leg_hops(route, station, alight)
                if hops is None:
                    continue
                legs.append(TransferLeg(route_id, station, alight, hops))
                visited.add(alight)
                extend(alight, visited, legs)
                visited.discard(alight)
                legs.pop()

    extend(origin, {origin}, [])
    plans.sort(key=_plan_sort_key)
    return plans[:max_plans]
