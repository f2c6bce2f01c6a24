import { describe, expect, it } from "vitest";

import { ViewSequencer } from "../src/sequence.js";

describe("per-view response ordering", () => {
  it("applies responses that arrive in request order", () => {
    const seq = new ViewSequencer();
    const a = seq.begin("od");
    const b = seq.begin("od");
    expect(seq.shouldApply("od", a)).toBe(true);
    expect(seq.shouldApply("od", b)).toBe(true);
  });

  it("discards a stale response arriving after a newer one", () => {
    const seq = new ViewSequencer();
    const first = seq.begin("od");
    const second = seq.begin("od");
    expect(seq.shouldApply("od", second)).toBe(true);
    expect(seq.shouldApply("od", first)).toBe(false);
  });

  it("never applies the same token twice", () => {
    const seq = new ViewSequencer();
    const t = seq.begin("forecast");
    expect(seq.shouldApply("forecast", t)).toBe(true);
    expect(seq.shouldApply("forecast", t)).toBe(false);
  });

  it("tracks views independently", () => {
    const seq = new ViewSequencer();
    const od1 = seq.begin("od");
    const acc1 = seq.begin("accessibility");
    const od2 = seq.begin("od");
    expect(seq.shouldApply("od", od2)).toBe(true);
    expect(seq.shouldApply("accessibility", acc1)).toBe(true);
    expect(seq.shouldApply("od", od1)).toBe(false);
  });
});
