"""Transportation-hub analytics.

Taxi probe GPS goes in; OD matrices, per-period flow series, a dummy
variable flow forecaster with full inference, accessibility, travel-time
reliability, congestion levels, bus transfer plans, and a read-only HTTP
query service come out.
"""

from .analytics import (
    AccessibilityResult,
    CongestionGrid,
    CongestionThresholds,
    FlowDirection,
    FlowEntry,
    FlowSeries,
    ODMatrix,
    PeriodScheme,
    ReliabilityResult,
    TimeWindow,
    accessibility,
    build_od_matrix,
    compute_service_extent,
    hub_flow_series,
    reliability,
    road_condition,
)
from .probe import (
    CircleGeofence,
    HubDirection,
    HubEvent,
    PolygonGeofence,
    ProbeRecord,
    RejectLog,
    Track,
    Trip,
    VehicleState,
    build_tracks,
    detect_hub_events,
    extract_trips,
    parse_probe_csv,
)
from .transfer import BusNetwork, BusRoute, Station, TransferPlan, find_plans, load_network
from .zones import (
    TrafficZone,
    ZoneIndex,
    ZoneSet,
    assign_trip_zones,
    build_index,
    load_zones,
    locate,
    synthetic_zone_grid,
)

__version__ = "0.1.0"
