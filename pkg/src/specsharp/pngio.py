"""PNG read/write at the tool boundary (8-bit RGB and grayscale)."""
from __future__ import annotations

import io

import numpy as np
from PIL import Image, UnidentifiedImageError

from .color import DecodeError, PlanarImage, decode_to_linear, encode_to_srgb


def _decode(pil_image: Image.Image) -> PlanarImage:
    # grayscale inputs are widened to RGB so the whole pipeline sees one layout
    if pil_image.mode != "RGB":
        pil_image = pil_image.convert("RGB")
    return decode_to_linear(np.asarray(pil_image))


def read_image(path) -> PlanarImage:
    try:
        with Image.open(path) as img:
            return _decode(img)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"cannot decode image {path}: {exc}") from exc


def decode_bytes(data: bytes) -> PlanarImage:
    try:
        with Image.open(io.BytesIO(data)) as img:
            return _decode(img)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"cannot decode image bytes: {exc}") from exc


def encode_bytes(img: PlanarImage) -> bytes:
    codes = encode_to_srgb(img)
    mode = "L" if codes.ndim == 2 else "RGB"
    buf = io.BytesIO()
    Image.fromarray(codes, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def write_image(img: PlanarImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_bytes(img))
