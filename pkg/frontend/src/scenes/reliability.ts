/** Reliability view: zones colored by the served spread classification. */

import type { ReliabilityPayload } from "../types.js";

export const RELIABILITY_COLORS: Record<string, string> = {
  reliable: "#2e7fd4",
  poor: "#c8401f",
  undefined: "#bdbdbd",
};

export interface ReliabilityCell {
  zoneId: number;
  classification: string;
  fill: string;
  samples: number;
  p10: number | null;
  median: number | null;
  p90: number | null;
  spread: number | null;
}

export interface ReliabilityScene {
  kind: "reliability";
  threshold: number;
  minSamples: number;
  cells: ReliabilityCell[];
}

export function buildReliabilityScene(payload: ReliabilityPayload): ReliabilityScene {
  return {
    kind: "reliability",
    threshold: payload.threshold,
    minSamples: payload.min_samples,
    cells: payload.zones.map((z) => ({
      zoneId: z.zone_id,
      classification: z.classification,
      fill: RELIABILITY_COLORS[z.classification] ?? RELIABILITY_COLORS["undefined"]!,
      samples: z.samples,
      p10: z.p10_minutes,
      median: z.median_minutes,
      p90: z.p90_minutes,
      spread: z.spread_index,
    })),
  };
}
