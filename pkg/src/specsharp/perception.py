"""Frequency-domain surrogate of the perceptual viewing simulation.

The simulation attenuates spectral power by 10^(s(d) * nu), where the
per-distance log-slope s(d) comes from white-noise measurements of the
reference perceptual pipeline. Because that response is measured as a
power spectrum, the amplitude gain applied to DFT coefficients defaults
to its square root (`amplitude_exponent=0.5`); the literal reading that
multiplies amplitudes by the full power response is available via
`amplitude_exponent=1.0`.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .color import PlanarImage
from .spectral import normalized_frequency_grid, radial_power_spectrum

# Log10 slopes of the relative white-noise power spectrum per viewing
# distance (cm), measured on the reference perceptual pipeline. A zero
# anchor at d=0 makes short distances interpolate toward identity.
DEFAULT_SLOPE_ANCHORS = (
    (0.0, 0.0),
    (10.0, -0.44),
    (20.0, -1.02),
    (30.0, -1.59),
    (40.0, -2.20),
    (50.0, -2.80),
    (60.0, -3.37),
    (70.0, -3.88),
    (80.0, -4.36),
    (90.0, -4.78),
    (100.0, -5.14),
)

# Image in, image out, parameterized by viewing distance in cm.
Simulator = Callable[[PlanarImage, float], PlanarImage]


@dataclass(frozen=True)
class TransferModel:
    """Piecewise-linear log-slope table s(d), non-increasing in d.

    Below the first positive anchor the slope interpolates to the d=0
    identity anchor; above the last anchor it clamps (no extrapolated
    amplification).
    """

    anchors: tuple[tuple[float, float], ...] = DEFAULT_SLOPE_ANCHORS

    def __post_init__(self):
        anchors = tuple((float(d), float(s)) for d, s in self.anchors)
        if anchors[0][0] != 0.0:
            anchors = ((0.0, 0.0),) + anchors
        ds = [d for d, _ in anchors]
        slopes = [s for _, s in anchors]
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise ValueError("anchor distances must be strictly increasing")
        if any(b > a + 1e-12 for a, b in zip(slopes, slopes[1:])):
            raise ValueError("slopes must be non-increasing in distance")
        object.__setattr__(self, "anchors", anchors)

    @classmethod
    def from_json(cls, path) -> "TransferModel":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(anchors=tuple((d, s) for d, s in payload["anchors"]))

    def slope_at(self, d: float) -> float:
        if d <= 0:
            raise ValueError("viewing distance must be positive")
        ds = np.array([a for a, _ in self.anchors])
        ss = np.array([s for _, s in self.anchors])
        if d >= ds[-1]:
            return float(ss[-1])
        return float(np.interp(d, ds, ss))

    def content_hash(self) -> str:
        """Stable hash of the anchor table, for weight-cache staleness checks."""
        blob = json.dumps([[d, s] for d, s in self.anchors]).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def transfer_at(model: TransferModel, d: float, nu: float) -> float:
    """Power-spectrum response 10^(s(d)*nu); 1.0 at nu=0 for any d."""
    if not 0.0 <= nu <= 1.0:
        raise ValueError("nu must be within [0, 1]")
    return 10.0 ** (model.slope_at(d) * nu)


def band_transfer_constant(model: TransferModel, d: float,
                           interval: tuple[float, float]) -> float:
    """Representative response for a (lo, hi] band: value at its geometric midpoint."""
    lo, hi = interval
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError("interval must satisfy 0 <= lo < hi <= 1")
    midpoint = math.sqrt(lo * hi) if lo > 0 else hi / 2.0
    return transfer_at(model, d, midpoint)


def simulate(model: TransferModel, d: float, img: PlanarImage,
             amplitude_exponent: float = 0.5) -> PlanarImage:
    """Apply the surrogate viewing simulation to a single-channel image.

    Multiplies each DFT coefficient by the power response raised to
    `amplitude_exponent` at that coefficient's radial frequency (corner
    coefficients beyond nu=1 use the same formula). DC gain is 1, so
    the mean is preserved.
    """
    if img.channels != 1:
        raise ValueError("simulate expects a single-channel image")
    if min(img.width, img.height) < 8:
        raise ValueError("image must be at least 8 pixels per side")
    slope = model.slope_at(d)
    nu = normalized_frequency_grid(img.height, img.width)
    gain = 10.0 ** (slope * nu * amplitude_exponent)
    out = np.fft.ifft2(np.fft.fft2(img.plane(0)) * gain).real
    return PlanarImage.gray(out)


def surrogate_simulator(model: TransferModel,
                        amplitude_exponent: float = 0.5) -> Simulator:
    """Bind a TransferModel into the plain image-in/image-out interface."""

    def run(img: PlanarImage, d: float) -> PlanarImage:
        return simulate(model, d, img, amplitude_exponent)

    return run


def white_noise(width: int, height: int, seed: int) -> PlanarImage:
    """Gaussian noise scaled so its radial power spectrum averages to one."""
    if min(width, height) < 8:
        raise ValueError("noise image must be at least 8 pixels per side")
    rng = np.random.default_rng(seed)
    plane = rng.standard_normal((height, width))
    mean_power = np.nanmean(radial_power_spectrum(plane).power)
    return PlanarImage.gray(plane / math.sqrt(mean_power))


@dataclass(frozen=True)
class ViewingGeometry:
    """Physical display setup: distance, density and raster size."""

    distance_cm: float
    pixels_per_cm: float
    width: int
    height: int

    def __post_init__(self):
        if min(self.distance_cm, self.pixels_per_cm, self.width, self.height) <= 0:
            raise ValueError("viewing geometry values must be strictly positive")


def nyquist_cpd(geom: ViewingGeometry) -> float:
    """Highest representable frequency in cycles per degree of visual angle."""
    cm_per_degree = 2.0 * geom.distance_cm * math.tan(math.radians(0.5))
    return geom.pixels_per_cm * cm_per_degree / 2.0
