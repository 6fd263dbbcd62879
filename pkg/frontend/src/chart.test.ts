import { describe, expect, it } from "vitest";

import { logRange, toPolyline } from "./chart.js";

const series = [
  { nu: 0.25, power: 1.0 },
  { nu: 0.5, power: 0.01 },
  { nu: 0.75, power: 0.0 }, // dead bin, skipped
  { nu: 1.0, power: 100.0 },
];

describe("chart scaling", () => {
  it("computes the joint log range over live bins", () => {
    expect(logRange([series])).toEqual([-2, 2]);
  });

  it("maps nu to x and log power to inverted y", () => {
    const line = toPolyline(series, 200, 100, -2, 2);
    expect(line).toHaveLength(3);
    expect(line[0]).toEqual([50, 50]); // log10(1)=0 is mid-range
    expect(line[1]).toEqual([100, 100]); // range minimum sits at the bottom
    expect(line[2]).toEqual([200, 0]); // range maximum at the top
  });

  it("degenerate ranges stay plottable", () => {
    const flat = [{ nu: 0.5, power: 1.0 }];
    const [lo, hi] = logRange([flat]);
    expect(hi).toBeGreaterThan(lo);
    expect(logRange([[]])).toEqual([-1, 1]);
  });
});
