import { describe, expect, it } from "vitest";

import { LatestGate } from "./tokens.js";

describe("LatestGate", () => {
  it("accepts only the most recent token", () => {
    const gate = new LatestGate();
    const first = gate.issue();
    const second = gate.issue();
    expect(gate.isCurrent(first)).toBe(false);
    expect(gate.isCurrent(second)).toBe(true);
  });

  it("out-of-order responses cannot overwrite a newer one", () => {
    const gate = new LatestGate();
    const displayed: number[] = [];
    // simulate requests for d = 60, 80, 100; responses arrive 100, 60, 80
    const requests = [60, 80, 100].map((d) => ({ d, token: gate.issue() }));
    for (const r of [requests[2], requests[0], requests[1]]) {
      if (gate.isCurrent(r.token)) displayed.push(r.d);
    }
    expect(displayed).toEqual([100]); // only the settled distance is shown
  });

  it("invalidate drops everything in flight", () => {
    const gate = new LatestGate();
    const token = gate.issue();
    gate.invalidate();
    expect(gate.isCurrent(token)).toBe(false);
  });
});
