/** Accessibility view: zones shaded when the server marked them
 * reachable for the selected budget. Shading reflects the latest
 * successful response only; a failed refresh keeps the previous shading
 * and raises a stale-data badge.
 */

import type { AccessibilityPayload } from "../types.js";
import { accessibilityPath } from "../api.js";

export interface AccessibilityScene {
  kind: "accessibility";
  shadedZoneIds: number[];
  budget: number;
  minSamples: number | null;
  staleData: boolean;
}

/** A nonpositive budget reaches nothing; skip the round trip entirely. */
export function planAccessibilityRequest(
  budgetMin: number,
  minSamples: number | null,
): { send: false; scene: AccessibilityScene } | { send: true; path: string } {
  if (budgetMin <= 0) {
    return {
      send: false,
      scene: {
        kind: "accessibility",
        shadedZoneIds: [],
        budget: budgetMin,
        minSamples,
        staleData: false,
      },
    };
  }
  return { send: true, path: accessibilityPath(budgetMin, minSamples) };
}

export function buildAccessibilityScene(payload: AccessibilityPayload): AccessibilityScene {
  return {
    kind: "accessibility",
    shadedZoneIds: payload.zones.filter((z) => z.reachable).map((z) => z.zone_id),
    budget: payload.budget_minutes,
    minSamples: payload.min_samples,
    staleData: false,
  };
}

export function markStale(previous: AccessibilityScene): AccessibilityScene {
  return { ...previous, shadedZoneIds: [...previous.shadedZoneIds], staleData: true };
}
