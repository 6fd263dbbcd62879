"""Gaussian-pyramid decomposition of luminance into full-resolution bands.

Each band is the difference of two successively blurred full-resolution
images, so `lowpass + sum(bands)` telescopes back to the input exactly.
Band i nominally carries the octave (2^-i, 2^-(i-1)] in normalized
frequency (1.0 = Nyquist).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .color import PlanarImage

# Burt-Adelson 5-tap binomial kernel, applied separably with mirror bounds.
BINOMIAL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


@dataclass(frozen=True)
class BandStack:
    """L-1 full-resolution bandpass images plus the lowpass residual."""

    bands: tuple[PlanarImage, ...]
    lowpass: PlanarImage
    levels: int
    band_intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.bands) != self.levels - 1:
            raise ValueError("band count must be levels - 1")


def blur(plane: np.ndarray) -> np.ndarray:
    out = ndimage.convolve1d(plane, BINOMIAL5, axis=0, mode="mirror")
    return ndimage.convolve1d(out, BINOMIAL5, axis=1, mode="mirror")


def _downsample(plane: np.ndarray) -> np.ndarray:
    return blur(plane)[::2, ::2]


def _upsample_axis(plane: np.ndarray, size: int, axis: int) -> np.ndarray:
    # Output index i maps to input coordinate i/2 (samples kept at 0,2,4,..).
    coord = np.arange(size) / 2.0
    i0 = np.floor(coord).astype(int)
    frac = coord - i0
    i1 = np.minimum(i0 + 1, plane.shape[axis] - 1)
    shape = [1, 1]
    shape[axis] = size
    frac = frac.reshape(shape)
    return np.take(plane, i0, axis=axis) * (1.0 - frac) + np.take(plane, i1, axis=axis) * frac


def _upsample(plane: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    return _upsample_axis(_upsample_axis(plane, shape[0], 0), shape[1], 1)


def band_intervals(levels: int) -> tuple[tuple[float, float], ...]:
    """Nominal (lo, hi] normalized-frequency interval per band, finest first."""
    return tuple((2.0 ** -(i + 1), 2.0 ** -i) for i in range(levels - 1))


def max_levels(width: int, height: int) -> int:
    """Largest L such that the image holds 2^(L-1) pixels per side."""
    return int(math.floor(math.log2(min(width, height)))) + 1


def default_levels(width: int, height: int) -> int:
    if min(width, height) < 16:
        raise ValueError("default_levels needs at least 16 pixels per side")
    return int(np.clip(math.floor(math.log2(min(width, height))) - 3, 3, 7))


def decompose(luminance: PlanarImage, levels: int) -> BandStack:
    """Split a single-channel image into levels-1 bands plus a lowpass.

    Builds the Gaussian pyramid (blur, downsample by 2), upsamples every
    level back to full resolution bilinearly, and differences neighbors.
    """
    if luminance.channels != 1:
        raise ValueError("decompose expects a single-channel image")
    if levels < 2:
        raise ValueError("levels must be at least 2")
    feasible = max_levels(luminance.width, luminance.height)
    if levels > feasible:
        raise ValueError(
            f"image {luminance.width}x{luminance.height} too small for "
            f"{levels} levels (maximum feasible is {feasible})"
        )
    gaussians = [luminance.plane(0)]
    for _ in range(levels - 1):
        gaussians.append(_downsample(gaussians[-1]))
    full = [gaussians[0]]
    for k in range(1, levels):
        t = gaussians[k]
        for j in range(k, 0, -1):
            t = _upsample(t, gaussians[j - 1].shape)
        full.append(t)
    bands = tuple(PlanarImage.gray(full[k - 1] - full[k]) for k in range(1, levels))
    return BandStack(
        bands=bands,
        lowpass=PlanarImage.gray(full[levels - 1]),
        levels=levels,
        band_intervals=band_intervals(levels),
    )


def recombine_weighted(stack: BandStack, weights) -> PlanarImage:
    """lowpass + sum(w_i * band_i); the lowpass weight is fixed at 1."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (stack.levels - 1,):
        raise ValueError(
            f"expected {stack.levels - 1} weights, got {weights.shape}"
        )
    if np.any(weights < 0):
        raise ValueError("band weights must be non-negative")
    out = stack.lowpass.plane(0).copy()
    for w, band in zip(weights, stack.bands):
        out += w * band.plane(0)
    return PlanarImage.gray(out)
