"""Pixel containers and sRGB / XYZ / xyY color conversions.

All math is float64; 8-bit values exist only at the decode/encode
boundary. Luminance edits elsewhere in the package go through xyY so
that per-pixel chromaticity is preserved exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# CIE 1931 chromaticities of the sRGB primaries and the D65 white point.
# The RGB<->XYZ matrices are derived from these at import time, so that
# linear (1,1,1) lands exactly on the white point.
# http://www.brucelindbloom.com/index.html?Eqn_RGB_XYZ_Matrix.html
_PRIMARIES = ((0.64, 0.33), (0.30, 0.60), (0.15, 0.06))
D65_XY = (0.3127, 0.3290)


def _derive_rgb_to_xyz():
    cols = np.array([[x / y, 1.0, (1.0 - x - y) / y] for x, y in _PRIMARIES]).T
    wx, wy = D65_XY
    white = np.array([wx / wy, 1.0, (1.0 - wx - wy) / wy])
    return cols * np.linalg.solve(cols, white)


RGB_TO_XYZ = _derive_rgb_to_xyz()
XYZ_TO_RGB = np.linalg.inv(RGB_TO_XYZ)
for _m in (RGB_TO_XYZ, XYZ_TO_RGB):
    _m.setflags(write=False)


class DecodeError(ValueError):
    """Raised for rasters the 8-bit sRGB decoder cannot handle."""


@dataclass(frozen=True)
class PlanarImage:
    """Float64 raster stored as one read-only plane per channel.

    `data` has shape (channels, height, width); channels is 1 (gray),
    2 (chromaticity pairs) or 3 (RGB). Samples must be finite.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[0] not in (1, 2, 3):
            raise ValueError(f"expected (channels, height, width) with 1-3 channels, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("image contains non-finite samples")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def plane(self, i: int = 0) -> np.ndarray:
        """Read-only 2D view of channel i."""
        return self.data[i]

    @classmethod
    def gray(cls, plane: np.ndarray) -> "PlanarImage":
        return cls(np.asarray(plane, dtype=np.float64)[None, :, :])


@dataclass(frozen=True)
class LumaChroma:
    """Linear CIE luminance plus per-pixel (x, y) chromaticity."""

    luminance: PlanarImage
    chromaticity: PlanarImage

    def __post_init__(self):
        if self.luminance.channels != 1 or self.chromaticity.channels != 2:
            raise ValueError("luminance must be 1-channel, chromaticity 2-channel")
        if self.luminance.data.shape[1:] != self.chromaticity.data.shape[1:]:
            raise ValueError("luminance/chromaticity dimensions differ")


def srgb_eotf(encoded: np.ndarray) -> np.ndarray:
    """IEC 61966-2-1 transfer: encoded [0,1] -> linear [0,1]."""
    encoded = np.asarray(encoded, dtype=np.float64)
    return np.where(encoded > 0.04045,
                    ((encoded + 0.055) / 1.055) ** 2.4,
                    encoded / 12.92)


def srgb_oetf(linear: np.ndarray) -> np.ndarray:
    """Inverse transfer: linear [0,1] -> encoded [0,1]."""
    linear = np.asarray(linear, dtype=np.float64)
    return np.where(linear > 0.04045 / 12.92,
                    1.055 * np.maximum(linear, 0.0) ** (1.0 / 2.4) - 0.055,
                    linear * 12.92)


def decode_to_linear(encoded: np.ndarray) -> PlanarImage:
    """Decode an 8-bit sRGB raster, (H, W) gray or (H, W, 3) RGB, to linear."""
    arr = np.asarray(encoded)
    if arr.dtype != np.uint8:
        raise DecodeError(f"unsupported bit depth {arr.dtype}, expected uint8")
    if arr.ndim == 2:
        planes = arr[None, :, :]
    elif arr.ndim == 3 and arr.shape[2] in (1, 3):
        planes = np.moveaxis(arr, 2, 0)
    else:
        raise DecodeError(f"unsupported channel layout {arr.shape}")
    return PlanarImage(srgb_eotf(planes / 255.0))


def encode_to_srgb(img: PlanarImage) -> np.ndarray:
    """Encode a linear image to 8-bit sRGB, (H, W) for gray or (H, W, 3)."""
    clipped = np.clip(img.data, 0.0, 1.0)
    codes = np.rint(srgb_oetf(clipped) * 255.0).astype(np.uint8)
    if img.channels == 1:
        return codes[0]
    return np.ascontiguousarray(np.moveaxis(codes, 0, 2))


def split_luma_chroma(rgb: PlanarImage) -> LumaChroma:
    """Split a linear-RGB image into CIE Y and (x, y) chromaticity.

    Zero-energy pixels (X+Y+Z = 0) take the D65 white chromaticity.
    """
    if rgb.channels != 3:
        raise ValueError("split_luma_chroma expects a 3-channel image")
    xyz = np.einsum("ij,jhw->ihw", RGB_TO_XYZ, rgb.data)
    total = xyz.sum(axis=0)
    degenerate = total < 1e-12
    safe = np.where(degenerate, 1.0, total)
    x = np.where(degenerate, D65_XY[0], xyz[0] / safe)
    y = np.where(degenerate, D65_XY[1], xyz[1] / safe)
    return LumaChroma(
        luminance=PlanarImage.gray(xyz[1]),
        chromaticity=PlanarImage(np.stack([x, y])),
    )


def xyy_to_linear_rgb(chromaticity: PlanarImage, luminance: np.ndarray) -> np.ndarray:
    """xyY -> linear RGB planes, unclamped (callers decide gamut handling)."""
    x = chromaticity.plane(0)
    y = chromaticity.plane(1)
    ratio = luminance / y
    xyz = np.stack([x * ratio, luminance, (1.0 - x - y) * ratio])
    return np.einsum("ij,jhw->ihw", XYZ_TO_RGB, xyz)


def recombine(chroma_source: LumaChroma, new_luminance: PlanarImage) -> PlanarImage:
    """Rebuild a linear-RGB image from new luminance and preserved chromaticity.

    Negative luminance clamps to 0 before conversion; out-of-gamut results
    clamp per channel to [0, 1].
    """
    if new_luminance.data.shape[1:] != chroma_source.luminance.data.shape[1:]:
        raise ValueError("new_luminance dimensions do not match chroma source")
    lum = np.maximum(new_luminance.plane(0), 0.0)
    rgb = xyy_to_linear_rgb(chroma_source.chromaticity, lum)
    return PlanarImage(np.clip(rgb, 0.0, 1.0))
