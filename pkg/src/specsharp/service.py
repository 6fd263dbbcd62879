"""HTTP facade over the sharpen pipeline for the interactive slider UI.

Each uploaded image is decoded, split, and decomposed exactly once; the
per-request work for a new viewing distance is only the weighted band
sum and the color recombination, which is what keeps slider interaction
fluid. Binds to loopback by default; there is no authentication.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import pngio
from .calibration import WeightCache, weights_for
from .color import DecodeError, LumaChroma, recombine, split_luma_chroma
from .perception import TransferModel, simulate
from .pipeline import compose_with_weights, effective_levels
from .pyramid import BandStack, decompose
from .spectral import radial_power_spectrum

DEFAULT_MAX_BODY = 32 * 1024 * 1024
DEFAULT_SESSION_TIMEOUT = 15 * 60.0


@dataclass
class Session:
    id: str
    parts: LumaChroma
    stack: BandStack
    levels: int
    last_access: float = field(default_factory=time.monotonic)


class SessionStore:
    """Expiring in-memory session map; images are immutable once stored."""

    def __init__(self, timeout: float):
        self._timeout = timeout
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def put(self, session: Session) -> None:
        with self._lock:
            self._evict()
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            self._evict()
            session = self._sessions.get(session_id)
            if session is not None:
                session.last_access = time.monotonic()
            return session

    def _evict(self) -> None:
        deadline = time.monotonic() - self._timeout
        for key in [k for k, s in self._sessions.items() if s.last_access < deadline]:
            del self._sessions[key]


def _spectrum_payload(plane) -> list[dict]:
    spec = radial_power_spectrum(plane)
    power = np.nan_to_num(spec.power, nan=0.0)
    return [{"nu": float(n), "power": float(p)} for n, p in zip(spec.nu, power)]


def create_app(cache: WeightCache, model: TransferModel | None = None,
               static_dir=None, max_body: int = DEFAULT_MAX_BODY,
               session_timeout: float = DEFAULT_SESSION_TIMEOUT) -> FastAPI:
    model = model or TransferModel()
    store = SessionStore(session_timeout)
    app = FastAPI(title="specsharp")

    def parse_distance(request: Request) -> float | Response:
        raw = request.query_params.get("d")
        try:
            d = float(raw)
        except (TypeError, ValueError):
            return JSONResponse({"detail": f"bad distance {raw!r}"}, status_code=400)
        if not np.isfinite(d) or d <= 0:
            return JSONResponse({"detail": "distance must be positive"}, status_code=400)
        return d

    @app.get("/healthz")
    def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.post("/api/session", status_code=201)
    async def create_session(request: Request):
        body = await request.body()
        if len(body) > max_body:
            return JSONResponse({"detail": "image too large"}, status_code=413)
        try:
            image = pngio.decode_bytes(body)
            levels = effective_levels(image.width, image.height, cache)
            parts = split_luma_chroma(image)
            stack = decompose(parts.luminance, levels)
        except (DecodeError, ValueError) as exc:
            status = 415 if isinstance(exc, DecodeError) else 422
            return JSONResponse({"detail": str(exc)}, status_code=status)
        session = Session(id=uuid.uuid4().hex, parts=parts, stack=stack, levels=levels)
        store.put(session)
        return {"session_id": session.id, "width": image.width,
                "height": image.height, "levels": levels}

    @app.get("/api/session/{session_id}/sharpened")
    def sharpened(session_id: str, request: Request):
        session = store.get(session_id)
        if session is None:
            return JSONResponse({"detail": "unknown session"}, status_code=404)
        d = parse_distance(request)
        if isinstance(d, Response):
            return d
        ws = weights_for(cache, d)
        result = compose_with_weights(session.parts, session.stack,
                                      ws.weights[: session.levels - 1])
        return Response(content=pngio.encode_bytes(result.image),
                        media_type="image/png",
                        headers={"X-Clipped-Fraction": f"{result.clipped_fraction:.6f}"})

    @app.get("/api/session/{session_id}/simulated")
    def simulated(session_id: str, request: Request):
        session = store.get(session_id)
        if session is None:
            return JSONResponse({"detail": "unknown session"}, status_code=404)
        d = parse_distance(request)
        if isinstance(d, Response):
            return d
        preview = recombine(session.parts, simulate(model, d, session.parts.luminance))
        return Response(content=pngio.encode_bytes(preview), media_type="image/png")

    @app.get("/api/session/{session_id}/spectrum")
    def spectrum(session_id: str, request: Request):
        session = store.get(session_id)
        if session is None:
            return JSONResponse({"detail": "unknown session"}, status_code=404)
        d = parse_distance(request)
        if isinstance(d, Response):
            return d
        ws = weights_for(cache, d)
        result = compose_with_weights(session.parts, session.stack,
                                      ws.weights[: session.levels - 1])
        sharpened_y = split_luma_chroma(result.image).luminance
        simulated_y = simulate(model, d, session.parts.luminance)
        return {
            "original": _spectrum_payload(session.parts.luminance),
            "sharpened": _spectrum_payload(sharpened_y),
            "simulated": _spectrum_payload(simulated_y),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


@click.command()
@click.option("--cache", envvar="SPECSHARP_CACHE", required=True, type=click.Path(exists=True))
@click.option("--slopes", type=click.Path(exists=True), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
@click.option("--ui-dir", type=click.Path(), default="frontend",
              help="Directory of built UI assets served at /.")
def main(cache, slopes, host, port, ui_dir):
    """Serve the interactive sharpening API (and the web UI if built)."""
    import uvicorn

    weight_cache = WeightCache.load(cache)
    model = TransferModel.from_json(slopes) if slopes else TransferModel()
    if not weight_cache.matches_model(model):
        click.echo("warning: weight cache was calibrated for a different slope table",
                   err=True)
    app = create_app(weight_cache, model, static_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
