import {
  ApiError,
  createSession,
  fetchSharpened,
  fetchSimulated,
  fetchSpectrum,
  SpectrumResponse,
} from "./api.js";
import { logRange, toPolyline } from "./chart.js";
import { debounce } from "./debounce.js";
import { splitRects } from "./split.js";
import { badgeText, clampDistance, initialState, UiState, ViewMode } from "./state.js";
import { LatestGate } from "./tokens.js";

const state: UiState = initialState();
const gate = new LatestGate();

const fileInput = document.getElementById("file") as HTMLInputElement;
const slider = document.getElementById("distance") as HTMLInputElement;
const sliderValue = document.getElementById("distance-value") as HTMLSpanElement;
const badge = document.getElementById("clipped-badge") as HTMLSpanElement;
const errorBanner = document.getElementById("error") as HTMLDivElement;
const canvas = document.getElementById("view") as HTMLCanvasElement;
const spectrumToggle = document.getElementById("spectrum-toggle") as HTMLButtonElement;
const spectrumPanel = document.getElementById("spectrum-panel") as HTMLDivElement;
const spectrumCanvas = document.getElementById("spectrum") as HTMLCanvasElement;
const modeButtons = Array.from(
  document.querySelectorAll<HTMLButtonElement>("button[data-mode]"),
);

let originalBitmap: ImageBitmap | null = null;

function showError(message: string): void {
  errorBanner.textContent = message;
  errorBanner.hidden = message === "";
}

function setBadge(): void {
  badge.textContent = badgeText(state.clippedFraction);
}

function drawSingle(bitmap: ImageBitmap): void {
  canvas.width = bitmap.width;
  canvas.height = bitmap.height;
  const ctx = canvas.getContext("2d")!;
  ctx.drawImage(bitmap, 0, 0);
}

function drawSplit(left: ImageBitmap, right: ImageBitmap): void {
  canvas.width = left.width;
  canvas.height = left.height;
  const ctx = canvas.getContext("2d")!;
  const rects = splitRects(left.width, left.height);
  ctx.drawImage(left, rects.left.x, rects.left.y, rects.left.w, rects.left.h,
    rects.left.x, rects.left.y, rects.left.w, rects.left.h);
  ctx.drawImage(right, rects.right.x, rects.right.y, rects.right.w, rects.right.h,
    rects.right.x, rects.right.y, rects.right.w, rects.right.h);
  ctx.strokeStyle = "#fff";
  ctx.beginPath();
  ctx.moveTo(rects.right.x + 0.5, 0);
  ctx.lineTo(rects.right.x + 0.5, left.height);
  ctx.stroke();
}

const SERIES_COLORS: Record<string, string> = {
  original: "#888888",
  sharpened: "#d95f02",
  simulated: "#1b9e77",
};

function drawSpectrum(data: SpectrumResponse): void {
  const ctx = spectrumCanvas.getContext("2d")!;
  const { width, height } = spectrumCanvas;
  ctx.clearRect(0, 0, width, height);
  const series: Array<[string, typeof data.original]> = [
    ["original", data.original],
    ["sharpened", data.sharpened],
    ["simulated", data.simulated],
  ];
  const [lo, hi] = logRange(series.map(([, points]) => points));
  for (const [name, points] of series) {
    const line = toPolyline(points, width, height, lo, hi);
    if (line.length === 0) continue;
    ctx.strokeStyle = SERIES_COLORS[name] ?? "#000";
    ctx.beginPath();
    ctx.moveTo(line[0][0], line[0][1]);
    for (const [x, y] of line.slice(1)) ctx.lineTo(x, y);
    ctx.stroke();
  }
}

async function refreshView(): Promise<void> {
  if (state.sessionId === null) return;
  const token = gate.issue();
  const d = state.dCm;
  const mode: ViewMode = state.mode;
  try {
    let clipped: string | null = null;
    let draw: () => void;
    if (mode === "original") {
      draw = () => originalBitmap && drawSingle(originalBitmap);
    } else if (mode === "simulated") {
      const bitmap = await createImageBitmap(await fetchSimulated(state.sessionId, d));
      draw = () => drawSingle(bitmap);
    } else {
      const image = await fetchSharpened(state.sessionId, d);
      clipped = image.clippedFraction;
      const bitmap = await createImageBitmap(image.blob);
      draw = mode === "split" && originalBitmap !== null
        ? () => drawSplit(originalBitmap!, bitmap)
        : () => drawSingle(bitmap);
    }
    if (!gate.isCurrent(token)) return; // stale: a newer d settled meanwhile
    draw();
    state.displayedD = d;
    state.clippedFraction = clipped;
    setBadge();
    showError("");
    if (state.spectrumOpen) {
      const spectra = await fetchSpectrum(state.sessionId, d);
      if (gate.isCurrent(token)) drawSpectrum(spectra);
    }
  } catch (err) {
    if (gate.isCurrent(token)) {
      showError(err instanceof ApiError ? `server: ${err.message}` : String(err));
    }
  }
}

// trailing debounce at 100 ms keeps the request rate at or under 10/s
const debouncedRefresh = debounce(refreshView, 100);

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  gate.invalidate();
  try {
    const info = await createSession(file);
    state.sessionId = info.session_id;
    originalBitmap = await createImageBitmap(file);
    showError("");
    void refreshView();
  } catch (err) {
    state.sessionId = null;
    showError(err instanceof ApiError ? `upload failed: ${err.message}` : String(err));
  }
});

slider.addEventListener("input", () => {
  state.dCm = clampDistance(Number(slider.value));
  sliderValue.textContent = `${state.dCm} cm`;
  debouncedRefresh.call();
});

for (const button of modeButtons) {
  button.addEventListener("click", () => {
    state.mode = button.dataset.mode as ViewMode;
    for (const other of modeButtons) other.classList.toggle("active", other === button);
    void refreshView();
  });
}

spectrumToggle.addEventListener("click", () => {
  state.spectrumOpen = !state.spectrumOpen;
  spectrumPanel.hidden = !state.spectrumOpen;
  if (state.spectrumOpen) void refreshView();
});

sliderValue.textContent = `${state.dCm} cm`;
slider.value = String(state.dCm);
setBadge();
