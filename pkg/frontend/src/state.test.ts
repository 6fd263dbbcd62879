import { describe, expect, it } from "vitest";

import { badgeText, clampDistance, DEFAULT_DISTANCE, initialState } from "./state.js";

describe("state", () => {
  it("starts at the default distance in sharpened mode", () => {
    const state = initialState();
    expect(state.dCm).toBe(DEFAULT_DISTANCE);
    expect(state.mode).toBe("sharpened");
    expect(state.displayedD).toBeNull();
  });

  it("clamps the slider range", () => {
    expect(clampDistance(0)).toBe(1);
    expect(clampDistance(75)).toBe(75);
    expect(clampDistance(9000)).toBe(150);
    expect(clampDistance(Number.NaN)).toBe(DEFAULT_DISTANCE);
  });

  it("badge mirrors the X-Clipped-Fraction header verbatim", () => {
    expect(badgeText("0.363312")).toBe("clipped 0.363312");
    expect(badgeText(null)).toBe("");
  });
});
