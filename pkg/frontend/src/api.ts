import type { SpectrumPoint } from "./chart.js";

export interface SessionInfo {
  session_id: string;
  width: number;
  height: number;
  levels: number;
}

export interface SharpenedImage {
  blob: Blob;
  clippedFraction: string | null;
}

export interface SpectrumResponse {
  original: SpectrumPoint[];
  sharpened: SpectrumPoint[];
  simulated: SpectrumPoint[];
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function raiseFor(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(response.status, detail);
}

export async function createSession(file: Blob): Promise<SessionInfo> {
  const response = await fetch("/api/session", { method: "POST", body: file });
  if (!response.ok) await raiseFor(response);
  return response.json();
}

export async function fetchSharpened(sessionId: string, d: number): Promise<SharpenedImage> {
  const response = await fetch(`/api/session/${sessionId}/sharpened?d=${d}`);
  if (!response.ok) await raiseFor(response);
  return {
    blob: await response.blob(),
    clippedFraction: response.headers.get("X-Clipped-Fraction"),
  };
}

export async function fetchSimulated(sessionId: string, d: number): Promise<Blob> {
  const response = await fetch(`/api/session/${sessionId}/simulated?d=${d}`);
  if (!response.ok) await raiseFor(response);
  return response.blob();
}

export async function fetchSpectrum(sessionId: string, d: number): Promise<SpectrumResponse> {
  const response = await fetch(`/api/session/${sessionId}/spectrum?d=${d}`);
  if (!response.ok) await raiseFor(response);
  return response.json();
}
