/** Typed client for the hubflow HTTP API.
 *
 * Query strings are built from view-state parameter objects by the
 * functions below, so "state serializes to the API" is a checkable fact
 * rather than a convention. The fetch implementation is injectable; tests
 * substitute fixture responses.
 */

import type {
  AccessibilityPayload,
  ApiErrorBody,
  CongestionPayload,
  FlowsPayload,
  ForecastPayload,
  ForecastReportPayload,
  OdPayload,
  ReliabilityPayload,
  ServiceExtentPayload,
  TransferPayload,
  ValidationPayload,
  ZonesPayload,
} from "./types.js";
import type { Direction } from "./state.js";

export function odPath(params: { window: string | null }, mode = "taxi"): string {
  const q = new URLSearchParams({ mode });
  if (params.window !== null) q.set("window", params.window);
  return "/od?" + q.toString();
}

export function flowsPath(direction: Direction, from?: string, to?: string): string {
  const q = new URLSearchParams({ direction });
  if (from !== undefined) q.set("from", from);
  if (to !== undefined) q.set("to", to);
  return "/flows?" + q.toString();
}

export function forecastPath(direction: Direction, period: number): string {
  return "/forecast?" + new URLSearchParams({ direction, period: String(period) }).toString();
}

export function forecastReportPath(direction: Direction): string {
  return "/forecast/report?" + new URLSearchParams({ direction }).toString();
}

export function validationPath(direction: Direction): string {
  return "/validation?" + new URLSearchParams({ direction }).toString();
}

export function accessibilityPath(budgetMin: number, minSamples: number | null): string {
  const q = new URLSearchParams({ budget_min: String(budgetMin) });
  if (minSamples !== null) q.set("min_samples", String(minSamples));
  return "/accessibility?" + q.toString();
}

export function congestionPath(date: string, period: number): string {
  return "/congestion?" + new URLSearchParams({ date, period: String(period) }).toString();
}

export function transferPath(from: string, to: string, maxTransfers: number): string {
  const q = new URLSearchParams({ from, to, max_transfers: String(maxTransfers) });
  return "/transfer?" + q.toString();
}

export function serviceExtentPath(q?: number): string {
  if (q === undefined) return "/service-extent";
  return "/service-extent?" + new URLSearchParams({ q: String(q) }).toString();
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

/** Minimal structural slice of fetch, easy to stub. */
export type FetchLike = (url: string) => Promise<{
  status: number;
  json(): Promise<unknown>;
}>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path);
    const body = await resp.json();
    if (resp.status !== 200) {
      const err = body as Partial<ApiErrorBody>;
      throw new ApiRequestError(
        resp.status,
        err.error?.code ?? "unknown",
        err.error?.message ?? `request failed with status ${resp.status}`,
      );
    }
    return body as T;
  }

  zones(): Promise<ZonesPayload> {
    return this.get("/zones");
  }

  od(params: { window: string | null }): Promise<OdPayload> {
    return this.get(odPath(params));
  }

  flows(direction: Direction, from?: string, to?: string): Promise<FlowsPayload> {
    return this.get(flowsPath(direction, from, to));
  }

  forecast(direction: Direction, period: number): Promise<ForecastPayload> {
    return this.get(forecastPath(direction, period));
  }

  /** One request per period; the chart overlay shows these served values. */
  forecastAllPeriods(direction: Direction, periods: number): Promise<ForecastPayload[]> {
    return Promise.all(
      Array.from({ length: periods }, (_, i) => this.forecast(direction, i + 1)),
    );
  }

  forecastReport(direction: Direction): Promise<ForecastReportPayload> {
    return this.get(forecastReportPath(direction));
  }

  validation(direction: Direction): Promise<ValidationPayload> {
    return this.get(validationPath(direction));
  }

  accessibility(budgetMin: number, minSamples: number | null): Promise<AccessibilityPayload> {
    return this.get(accessibilityPath(budgetMin, minSamples));
  }

  reliability(): Promise<ReliabilityPayload> {
    return this.get("/reliability");
  }

  congestion(date: string, period: number): Promise<CongestionPayload> {
    return this.get(congestionPath(date, period));
  }

  transfer(from: string, to: string, maxTransfers: number): Promise<TransferPayload> {
    return this.get(transferPath(from, to, maxTransfers));
  }

  serviceExtent(q?: number): Promise<ServiceExtentPayload> {
    return this.get(serviceExtentPath(q));
  }
}
