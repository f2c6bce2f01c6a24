/** Transfer view: query form plus ranked plan list.
 *
 * Plans render in the order the server returned them; the transfer
 * stations of a selected plan are the boarding points of every leg after
 * the first, highlighted in the plan detail and on the schematic. The
 * station inventory comes from served plans (the API exposes no
 * coordinates for bus stations), so highlighting is schematic, not
 * geographic.
 */

import type { TransferPayload, TransferPlan } from "../types.js";

/** Client-side form validation; a non-null result means no request is sent. */
export function validateTransferForm(from: string, to: string): string | null {
  if (from.trim() === "" || to.trim() === "") {
    return "enter both an origin and a destination station";
  }
  if (from === to) {
    return "origin and destination are the same station";
  }
  return null;
}

export interface PlanView {
  index: number;
  badge: string;
  totalStops: number;
  stations: string[];
  transferStations: string[];
  legs: { route: string; board: string; alight: string; hops: number }[];
}

export function transferBadge(numTransfers: number): string {
  return `${numTransfers} transfer${numTransfers === 1 ? "" : "s"}`;
}

export function planHighlights(plan: TransferPlan): {
  stations: string[];
  transferStations: string[];
} {
  return {
    stations: plan.stations,
    transferStations: plan.legs.slice(1).map((leg) => leg.board),
  };
}

export function buildTransferList(payload: TransferPayload): PlanView[] {
  return payload.plans.map((plan, index) => ({
    index,
    badge: transferBadge(plan.num_transfers),
    totalStops: plan.total_stops,
    stations: plan.stations,
    transferStations: planHighlights(plan).transferStations,
    legs: plan.legs.map((l) => ({ ...l })),
  }));
}
