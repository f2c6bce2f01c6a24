/** Congestion view: zones colored by the served level. */

import type { CongestionPayload } from "../types.js";

export const CONGESTION_COLORS: Record<string, string> = {
  free: "#2e9e44",
  slow: "#e0a413",
  congested: "#cf3430",
  unknown: "#bdbdbd",
};

export interface CongestionCell {
  zoneId: number;
  level: string;
  fill: string;
  meanSpeed: number | null;
  samples: number;
}

export interface CongestionScene {
  kind: "congestion";
  date: string;
  period: number;
  cells: CongestionCell[];
}

export function buildCongestionScene(payload: CongestionPayload): CongestionScene {
  return {
    kind: "congestion",
    date: payload.date,
    period: payload.period,
    cells: payload.zones.map((z) => ({
      zoneId: z.zone_id,
      level: z.level,
      fill: CONGESTION_COLORS[z.level] ?? CONGESTION_COLORS["unknown"]!,
      meanSpeed: z.mean_speed_kmh,
      samples: z.samples,
    })),
  };
}
