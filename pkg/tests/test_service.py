import io
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from specsharp import pngio
from specsharp.calibration import calibrate_grid
from specsharp.color import PlanarImage
from specsharp.perception import TransferModel
from specsharp.service import create_app


@pytest.fixture(scope="module")
def model():
    return TransferModel()


@pytest.fixture(scope="module")
def small_cache(model):
    return calibrate_grid(model, [20.0, 50.0, 80.0], levels=5,
                          noise_size=128, seeds=(0, 1))


@pytest.fixture(scope="module")
def deep_cache(model):
    # levels=7 so large uploads keep their natural pyramid depth
    return calibrate_grid(model, [50.0], levels=7, noise_size=128, seeds=(0,))


@pytest.fixture(scope="module")
def client(small_cache, model):
    return TestClient(create_app(small_cache, model))


def card_bytes(seed=0, size=128):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / (size - 1)
    rgb = np.stack([0.2 + 0.6 * xx, 0.3 + 0.4 * yy,
                    0.5 + 0.2 * np.sin(7 * xx * np.pi)])
    rgb += 0.03 * rng.normal(size=rgb.shape)
    return pngio.encode_bytes(PlanarImage(np.clip(rgb, 0.0, 1.0)))


def make_session(client, **kwargs):
    response = client.post("/api/session", content=card_bytes(**kwargs))
    assert response.status_code == 201
    return response.json()


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.text == "ok"


def test_create_session(client):
    payload = make_session(client)
    assert payload["session_id"]
    assert payload["width"] == 128 and payload["height"] == 128
    # min(cache levels 5, natural depth of a 128px image = 4)
    assert payload["levels"] == 4


def test_undecodable_body_is_415(client):
    response = client.post("/api/session", content=b"this is not a png")
    assert response.status_code == 415


def test_oversize_body_is_413(small_cache, model):
    tiny_limit = TestClient(create_app(small_cache, model, max_body=64))
    response = tiny_limit.post("/api/session", content=card_bytes())
    assert response.status_code == 413


def test_large_upload_gets_deep_pyramid(deep_cache, model):
    client = TestClient(create_app(deep_cache, model))
    flat = np.full((2160, 3840, 3), 120, dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(flat).save(buf, format="PNG")
    response = client.post("/api/session", content=buf.getvalue())
    assert response.status_code == 201
    assert response.json()["levels"] == 7


def test_sharpened_near_zero_distance_matches_source(client):
    sid = make_session(client, seed=1)["session_id"]
    response = client.get(f"/api/session/{sid}/sharpened", params={"d": 0.001})
    assert response.status_code == 200
    assert response.headers["content-type"] == "image/png"
    out = np.asarray(Image.open(io.BytesIO(response.content)))
    src = np.asarray(Image.open(io.BytesIO(card_bytes(seed=1))))
    assert np.max(np.abs(out.astype(int) - src.astype(int))) <= 1


def test_sharpened_is_deterministic(client):
    sid = make_session(client, seed=2)["session_id"]
    a = client.get(f"/api/session/{sid}/sharpened", params={"d": 80})
    b = client.get(f"/api/session/{sid}/sharpened", params={"d": 80})
    assert a.content == b.content
    assert a.headers["X-Clipped-Fraction"] == b.headers["X-Clipped-Fraction"]
    float(a.headers["X-Clipped-Fraction"])  # parseable


def test_unknown_session_is_404(client):
    assert client.get("/api/session/nope/sharpened", params={"d": 50}).status_code == 404
    assert client.get("/api/session/nope/spectrum", params={"d": 50}).status_code == 404


def test_bad_distance_is_400(client):
    sid = make_session(client, seed=3)["session_id"]
    for bad in ("abc", "-5", "0"):
        response = client.get(f"/api/session/{sid}/sharpened", params={"d": bad})
        assert response.status_code == 400
    assert client.get(f"/api/session/{sid}/sharpened").status_code == 400


def test_spectrum_identity_at_tiny_distance(client):
    sid = make_session(client, seed=4)["session_id"]
    payload = client.get(f"/api/session/{sid}/spectrum", params={"d": 1e-6}).json()
    original = np.array([row["power"] for row in payload["original"]])
    sharpened = np.array([row["power"] for row in payload["sharpened"]])
    assert len(payload["original"]) == len(payload["sharpened"]) == len(payload["simulated"])
    nus = [row["nu"] for row in payload["original"]]
    assert all(a < b for a, b in zip(nus, nus[1:]))
    assert np.max(np.abs(sharpened - original) / np.maximum(original, 1e-30)) < 1e-6


def test_simulated_preview_endpoint(client):
    sid = make_session(client, seed=5)["session_id"]
    response = client.get(f"/api/session/{sid}/simulated", params={"d": 60})
    assert response.status_code == 200
    img = Image.open(io.BytesIO(response.content))
    assert img.size == (128, 128)


def test_session_expiry(small_cache, model):
    client = TestClient(create_app(small_cache, model, session_timeout=0.05))
    sid = make_session(client)["session_id"]
    assert client.get(f"/api/session/{sid}/sharpened", params={"d": 50}).status_code == 200
    time.sleep(0.1)
    assert client.get(f"/api/session/{sid}/sharpened", params={"d": 50}).status_code == 404


def test_sharpened_latency_budget(small_cache, model):
    client = TestClient(create_app(small_cache, model))
    size = 1024
    yy, xx = np.mgrid[0:size, 0:size] / (size - 1)
    rgb = np.stack([0.2 + 0.6 * xx, 0.3 + 0.4 * yy, np.full_like(xx, 0.45)])
    body = pngio.encode_bytes(PlanarImage(rgb))
    sid = client.post("/api/session", content=body).json()["session_id"]
    client.get(f"/api/session/{sid}/sharpened", params={"d": 50})  # warm-up
    start = time.perf_counter()
    response = client.get(f"/api/session/{sid}/sharpened", params={"d": 65})
    elapsed = time.perf_counter() - start
    assert response.status_code == 200
    assert elapsed < 0.25, f"sharpened response took {elapsed:.3f}s"
