export interface SpectrumPoint {
  nu: number;
  power: number;
}

const FLOOR = 1e-12;

/** Combined log10 range of several spectrum series, ignoring dead bins. */
export function logRange(series: SpectrumPoint[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const points of series) {
    for (const p of points) {
      if (p.power > FLOOR) {
        const v = Math.log10(p.power);
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  if (!Number.isFinite(lo)) return [-1, 1];
  if (hi - lo < 1e-9) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

/**
 * Map a spectrum to canvas polyline coordinates: x linear in nu over
 * [0, 1], y = log10(power) mapped top-down onto [yLo, yHi]. Bins at or
 * below the floor are skipped.
 */
export function toPolyline(
  points: SpectrumPoint[],
  width: number,
  height: number,
  yLo: number,
  yHi: number,
): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (const p of points) {
    if (p.power <= FLOOR) continue;
    const x = p.nu * width;
    const t = (Math.log10(p.power) - yLo) / (yHi - yLo);
    out.push([x, (1 - t) * height]);
  }
  return out;
}
