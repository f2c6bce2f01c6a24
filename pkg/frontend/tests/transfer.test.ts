import { describe, expect, it } from "vitest";

import {
  buildTransferList,
  planHighlights,
  transferBadge,
  validateTransferForm,
} from "../src/scenes/transfer.js";
import type { ApiErrorBody, TransferPayload } from "../src/types.js";
import directFixture from "./fixtures/transfer_direct.json";
import oneChangeFixture from "./fixtures/transfer_one_change.json";
import unknownStation from "./fixtures/error_unknown_station.json";

const DIRECT = directFixture as unknown as TransferPayload;
const ONE_CHANGE = oneChangeFixture as unknown as TransferPayload;

describe("transfer form validation", () => {
  it("same origin and destination is rejected before any request", () => {
    expect(validateTransferForm("B1", "B1")).toBe(
      "origin and destination are the same station",
    );
  });

  it("blank fields are rejected before any request", () => {
    expect(validateTransferForm("", "B3")).not.toBeNull();
    expect(validateTransferForm("B1", "  ")).not.toBeNull();
  });

  it("distinct stations pass", () => {
    expect(validateTransferForm("B1", "B3")).toBeNull();
  });
});

describe("transfer plan list", () => {
  it("direct route renders one plan with a 0 transfers badge", () => {
    const plans = buildTransferList(DIRECT);
    expect(plans.length).toBe(1);
    expect(plans[0]!.badge).toBe("0 transfers");
    expect(plans[0]!.legs.map((l) => l.route)).toEqual(["R1"]);
    expect(plans[0]!.transferStations).toEqual([]);
  });

  it("one-transfer fixture highlights the shared station", () => {
    const plans = buildTransferList(ONE_CHANGE);
    expect(plans.length).toBeGreaterThan(0);
    const best = plans[0]!;
    expect(best.badge).toBe("1 transfer");
    expect(best.stations).toEqual(["B2", "B3", "B4"]);
    expect(best.transferStations).toEqual(["B3"]);
    const highlights = planHighlights(ONE_CHANGE.plans[0]!);
    expect(highlights.transferStations).toEqual(["B3"]);
    expect(highlights.stations).toContain("B3");
  });

  it("keeps the served plan order", () => {
    const plans = buildTransferList(ONE_CHANGE);
    expect(plans.map((p) => p.index)).toEqual(plans.map((_, i) => i));
    plans.forEach((p, i) => {
      expect(p.stations).toEqual(ONE_CHANGE.plans[i]!.stations);
      expect(p.totalStops).toBe(ONE_CHANGE.plans[i]!.total_stops);
    });
  });

  it("legs chain board to alight", () => {
    for (const payload of [DIRECT, ONE_CHANGE]) {
      for (const plan of buildTransferList(payload)) {
        expect(plan.legs[0]!.board).toBe(payload.origin);
        expect(plan.legs.at(-1)!.alight).toBe(payload.destination);
        for (let i = 1; i < plan.legs.length; i++) {
          expect(plan.legs[i]!.board).toBe(plan.legs[i - 1]!.alight);
        }
      }
    }
  });

  it("badge text pluralizes", () => {
    expect(transferBadge(0)).toBe("0 transfers");
    expect(transferBadge(1)).toBe("1 transfer");
    expect(transferBadge(2)).toBe("2 transfers");
  });

  it("unknown-station error body carries the inline message", () => {
    const body = unknownStation as ApiErrorBody;
    expect(body.error.code).toBe("unknown_station");
    expect(body.error.message).toContain("NOPE");
  });
});
