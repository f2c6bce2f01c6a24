/** Response bodies served by the hubflow HTTP API, field for field. */

export interface ZoneFeature {
  zone_id: number;
  name: string;
  district: string;
  centroid: [number, number];
  ring: [number, number][];
}

export interface ZonesPayload {
  config_hash: string;
  hub: [number, number];
  hub_zone_id: number;
  zones: ZoneFeature[];
}

export interface OdPair {
  origin: number;
  dest: number;
  count: number;
}

export interface OdPayload {
  config_hash: string;
  conserved: boolean;
  counts: OdPair[];
  hub_zone_id: number;
  mode: string;
  total_trips: number;
  unassigned: number;
  window: { start: string; end: string };
}

export interface FlowEntry {
  date: string;
  period: number;
  count: number;
}

export interface FlowsPayload {
  config_hash: string;
  direction: string;
  periods_per_day: number;
  entries: FlowEntry[];
}

export interface ForecastPayload {
  config_hash: string;
  direction: string;
  period: number;
  prediction: number;
}

export interface CoefficientRow {
  term: string;
  coefficient: number;
  standard_error: number;
  t_stat: number;
  p_value: number;
}

export interface AnovaRow {
  df: number;
  ss: number;
  ms?: number;
  f?: number;
  significance_f?: number;
}

export interface RegressionReport {
  model: {
    intercept: number;
    period_effects: Record<string, number>;
    periods: number;
    reference_period: number;
  };
  regression_statistics: {
    multiple_r: number;
    r_square: number;
    adjusted_r_square: number;
    standard_error: number;
    observations: number;
  };
  anova: {
    regression: AnovaRow;
    residual: AnovaRow;
    total: AnovaRow;
  };
  coefficients: CoefficientRow[];
  validation?: ValidationBlock | { error: string };
}

export interface ForecastReportPayload {
  config_hash: string;
  direction: string;
  report: RegressionReport;
}

export interface ValidationBlock {
  samples: number;
  mean_error_pct: number;
  max_error_pct: number;
  min_error_pct: number;
  excluded_zero_actuals: number;
}

export interface ValidationPayload {
  config_hash: string;
  direction: string;
  validation: ValidationBlock;
}

export interface AccessibilityZone {
  zone_id: number;
  samples: number;
  mean_minutes: number | null;
  reachable: boolean;
}

export interface AccessibilityPayload {
  config_hash: string;
  budget_minutes: number;
  min_samples: number;
  zones: AccessibilityZone[];
}

export interface ReliabilityZone {
  zone_id: number;
  samples: number;
  p10_minutes: number | null;
  median_minutes: number | null;
  p90_minutes: number | null;
  spread_index: number | null;
  classification: "reliable" | "poor" | "undefined";
}

export interface ReliabilityPayload {
  config_hash: string;
  threshold: number;
  min_samples: number;
  zones: ReliabilityZone[];
}

export interface CongestionZone {
  zone_id: number;
  level: "free" | "slow" | "congested" | "unknown";
  mean_speed_kmh: number | null;
  samples: number;
}

export interface CongestionPayload {
  config_hash: string;
  date: string;
  period: number;
  thresholds: { free_min_kmh: number; slow_min_kmh: number };
  zones: CongestionZone[];
}

export interface TransferLeg {
  route: string;
  board: string;
  alight: string;
  hops: number;
}

export interface TransferPlan {
  num_transfers: number;
  total_stops: number;
  stations: string[];
  legs: TransferLeg[];
}

export interface TransferPayload {
  config_hash: string;
  origin: string;
  destination: string;
  max_transfers: number;
  plans: TransferPlan[];
}

export interface ServiceExtentPayload {
  config_hash: string;
  q: number;
  radius_km: number;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
