"""Regenerate the bundled test card, its small weight cache, and the
golden sharpen hash. Run from the repository root after any change that
intentionally alters pixel output, then commit tests/data/."""
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from specsharp import pngio
from specsharp.calibration import calibrate_grid
from specsharp.color import PlanarImage
from specsharp.perception import TransferModel
from specsharp.pipeline import SharpenRequest, sharpen

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
GOLDEN_DISTANCE = 80.0


def make_testcard() -> PlanarImage:
    h = w = 256
    yy, xx = np.mgrid[0:h, 0:w] / (h - 1)
    r = 0.15 + 0.65 * xx
    g = 0.20 + 0.55 * yy
    b = 0.45 + 0.30 * np.sin(2 * np.pi * 2.5 * xx)
    rgb = np.stack([r, g, b])

    # concentric chirp: rings get finer toward the rim
    rad = np.sqrt((yy - 0.32) ** 2 + (xx - 0.30) ** 2)
    rings = 0.5 + 0.45 * np.cos(2 * np.pi * 55.0 * rad**1.6)
    disk = rad < 0.24
    for c, tint in enumerate((0.95, 0.75, 0.45)):
        rgb[c][disk] = rings[disk] * tint

    # step wedges of decreasing width
    edge = 0.12
    for k, width in enumerate((24, 12, 6, 3)):
        y0 = 176 + 18 * k
        stripe = ((np.arange(w) // width) % 2).astype(float)
        rgb[:, y0:y0 + 14, :] = 0.25 + 0.5 * stripe[None, None, :]
        rgb[2, y0:y0 + 14, :] += edge
    return PlanarImage(np.clip(rgb, 0.0, 1.0))


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    card = make_testcard()
    card_path = DATA / "testcard.png"
    pngio.write_image(card, card_path)

    cache_path = DATA / "golden_cache.json"
    cache = calibrate_grid(TransferModel(), [40.0, 80.0], levels=5,
                           noise_size=256, seeds=range(4), out_path=cache_path)

    result = sharpen(SharpenRequest(
        image=pngio.read_image(card_path),
        virtual_distance_cm=GOLDEN_DISTANCE,
        cache=cache,
    ))
    payload = {
        "distance_cm": GOLDEN_DISTANCE,
        "testcard_sha256": hashlib.sha256(card_path.read_bytes()).hexdigest(),
        "sharpened_sha256": hashlib.sha256(pngio.encode_bytes(result.image)).hexdigest(),
        "clipped_fraction": f"{result.clipped_fraction:.6f}",
    }
    (DATA / "golden.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(json.dumps(payload, indent=2))


if __name__ == "__main__":
    main()
