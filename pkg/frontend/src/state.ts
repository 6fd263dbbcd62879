export type ViewMode = "sharpened" | "original" | "simulated" | "split";

export const MIN_DISTANCE = 1;
export const MAX_DISTANCE = 150;
export const DEFAULT_DISTANCE = 50;

export interface UiState {
  sessionId: string | null;
  dCm: number;
  mode: ViewMode;
  /** Distance of the image currently on the canvas, null before first draw. */
  displayedD: number | null;
  /** Verbatim X-Clipped-Fraction header of the displayed image. */
  clippedFraction: string | null;
  spectrumOpen: boolean;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    dCm: DEFAULT_DISTANCE,
    mode: "sharpened",
    displayedD: null,
    clippedFraction: null,
    spectrumOpen: false,
  };
}

export function clampDistance(d: number): number {
  if (!Number.isFinite(d)) return DEFAULT_DISTANCE;
  return Math.min(MAX_DISTANCE, Math.max(MIN_DISTANCE, d));
}

/** Badge text shown next to the slider; mirrors the response header. */
export function badgeText(clippedFraction: string | null): string {
  return clippedFraction === null ? "" : `clipped ${clippedFraction}`;
}
