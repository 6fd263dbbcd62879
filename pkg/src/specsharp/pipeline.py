"""End-to-end sharpening: split luminance, reweight bands, recombine.

Only luminance is modified; chromaticity is carried through untouched.
Choosing a virtual distance larger than the physical one overcompensates,
which is the intended way to exaggerate detail.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import color, pyramid
from .calibration import WeightCache, weights_for
from .color import LumaChroma, PlanarImage
from .perception import TransferModel, simulate

_CLIP_TOL = 1e-9


@dataclass(frozen=True)
class SharpenRequest:
    image: PlanarImage
    virtual_distance_cm: float
    cache: WeightCache
    levels: int | None = None

    def __post_init__(self):
        if self.virtual_distance_cm <= 0:
            raise ValueError("virtual viewing distance must be positive")


@dataclass(frozen=True)
class SharpenResult:
    image: PlanarImage
    clipped_fraction: float
    levels: int
    weights: tuple[float, ...]


def effective_levels(width: int, height: int, cache: WeightCache,
                     requested: int | None = None) -> int:
    """Pyramid depth used for an image under a given cache.

    Defaults to the image's natural depth, capped by the cache depth
    (the cache's finest bands are the same octaves, so a shallower stack
    simply leaves deeper octaves in the unweighted lowpass).
    """
    feasible = pyramid.max_levels(width, height)
    if requested is not None:
        if requested < 2 or requested > cache.levels:
            raise ValueError(
                f"requested levels {requested} not supported by cache (levels={cache.levels})"
            )
        if requested > feasible:
            raise ValueError(f"image too small for {requested} levels (max {feasible})")
        return requested
    return min(cache.levels, pyramid.default_levels(width, height), feasible)


def compose_with_weights(parts: LumaChroma, stack: pyramid.BandStack,
                         weights) -> SharpenResult:
    """Weighted band recombination plus color rebuild, with clip accounting.

    This is the per-request tail of `sharpen`, split out so callers that
    keep a decomposed image around (the HTTP service) can reuse it.
    """
    weights = tuple(float(w) for w in weights)
    raw_y = pyramid.recombine_weighted(stack, weights).plane(0)
    y_clipped = (raw_y < -_CLIP_TOL) | (raw_y > 1.0 + _CLIP_TOL)
    y = np.clip(raw_y, 0.0, 1.0)
    rgb_raw = color.xyy_to_linear_rgb(parts.chromaticity, y)
    rgb_clipped = ((rgb_raw < -_CLIP_TOL) | (rgb_raw > 1.0 + _CLIP_TOL)).any(axis=0)
    clipped = float(np.mean(y_clipped | rgb_clipped))
    out = PlanarImage(np.clip(rgb_raw, 0.0, 1.0))
    return SharpenResult(image=out, clipped_fraction=clipped,
                         levels=stack.levels, weights=weights)


def sharpen(req: SharpenRequest) -> SharpenResult:
    """Apply distance compensation to a linear-RGB image."""
    levels = effective_levels(req.image.width, req.image.height, req.cache, req.levels)
    parts = color.split_luma_chroma(req.image)
    stack = pyramid.decompose(parts.luminance, levels)
    ws = weights_for(req.cache, req.virtual_distance_cm)
    return compose_with_weights(parts, stack, ws.weights[: levels - 1])


def simulate_view(image: PlanarImage, d: float, model: TransferModel,
                  amplitude_exponent: float = 0.5) -> PlanarImage:
    """Preview of what a viewer at distance d retains of the image.

    The luminance channel runs through the surrogate simulation;
    chromaticity is preserved.
    """
    parts = color.split_luma_chroma(image)
    sim_y = simulate(model, d, parts.luminance, amplitude_exponent)
    return color.recombine(parts, sim_y)
