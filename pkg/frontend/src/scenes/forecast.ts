/** Forecast view: per-period flow bars or curve with the served
 * predictions overlaid. No number shown here is computed client-side;
 * bars come from /flows entries and the overlay from /forecast responses.
 */

import type {
  FlowsPayload,
  ForecastPayload,
  ForecastReportPayload,
  RegressionReport,
} from "../types.js";
import type { ChartMode } from "../state.js";

export interface ForecastBar {
  period: number;
  count: number;
}

export interface OverlayPoint {
  period: number;
  value: number;
  label: string;
}

export interface ForecastScene {
  kind: "forecast";
  mode: ChartMode;
  date: string | null;
  bars: ForecastBar[];
  overlay: OverlayPoint[];
  banner: string | null;
}

export function formatPrediction(value: number): string {
  return value.toFixed(2);
}

export function buildForecastScene(
  flows: FlowsPayload | null,
  predictions: ForecastPayload[] | null,
  date: string | null,
  mode: ChartMode,
): ForecastScene {
  if (flows === null) {
    return { kind: "forecast", mode, date, bars: [], overlay: [], banner: "no flow data" };
  }
  const dates = [...new Set(flows.entries.map((e) => e.date))].sort();
  const chosen = date ?? dates[0] ?? null;
  const bars: ForecastBar[] = flows.entries
    .filter((e) => e.date === chosen)
    .sort((a, b) => a.period - b.period)
    .map((e) => ({ period: e.period, count: e.count }));

  const overlay: OverlayPoint[] = (predictions ?? [])
    .slice()
    .sort((a, b) => a.period - b.period)
    .map((p) => ({
      period: p.period,
      value: p.prediction,
      label: formatPrediction(p.prediction),
    }));

  return {
    kind: "forecast",
    mode,
    date: chosen,
    bars,
    overlay,
    banner: bars.length === 0 ? "no flow data" : null,
  };
}

export function missingReportScene(message: string, mode: ChartMode): ForecastScene {
  return { kind: "forecast", mode, date: null, bars: [], overlay: [], banner: message };
}

export interface TableRow {
  label: string;
  values: string[];
}

export interface ReportTables {
  statistics: TableRow[];
  anova: { header: string[]; rows: TableRow[] };
  coefficients: { header: string[]; rows: TableRow[] };
  validation: TableRow[] | null;
}

/** Numbers pass through String() so the table shows the served values. */
const cell = (v: number | string | null | undefined): string =>
  v === null || v === undefined ? "" : String(v);

export function buildReportTables(payload: ForecastReportPayload): ReportTables {
  const report: RegressionReport = payload.report;
  const stats = report.regression_statistics;
  const statistics: TableRow[] = [
    { label: "Multiple R", values: [cell(stats.multiple_r)] },
    { label: "R Square", values: [cell(stats.r_square)] },
    { label: "Adjusted R Square", values: [cell(stats.adjusted_r_square)] },
    { label: "Standard Error", values: [cell(stats.standard_error)] },
    { label: "Observations", values: [cell(stats.observations)] },
  ];

  const anovaRows: TableRow[] = (["regression", "residual", "total"] as const).map((name) => {
    const row = report.anova[name];
    return {
      label: name,
      values: [cell(row.df), cell(row.ss), cell(row.ms), cell(row.f), cell(row.significance_f)],
    };
  });

  const coefRows: TableRow[] = report.coefficients.map((c) => ({
    label: c.term,
    values: [cell(c.coefficient), cell(c.standard_error), cell(c.t_stat), cell(c.p_value)],
  }));

  let validation: TableRow[] | null = null;
  if (report.validation !== undefined && !("error" in report.validation)) {
    const v = report.validation;
    validation = [
      { label: "Samples", values: [cell(v.samples)] },
      { label: "Mean error %", values: [cell(v.mean_error_pct)] },
      { label: "Max error %", values: [cell(v.max_error_pct)] },
      { label: "Min error %", values: [cell(v.min_error_pct)] },
      { label: "Excluded zero actuals", values: [cell(v.excluded_zero_actuals)] },
    ];
  }

  return {
    statistics,
    anova: { header: ["df", "SS", "MS", "F", "Significance F"], rows: anovaRows },
    coefficients: { header: ["Coefficient", "Std Error", "t Stat", "P-value"], rows: coefRows },
    validation,
  };
}
