"""Radial power spectra and log-slope regression.

Conventions used throughout the package:

* power is the squared magnitude of the unitary 2D DFT, |F|^2 / (N*M),
  so a unit-variance image has unit mean power and summing the 2D power
  over all bins reproduces the image variance (Parseval);
* radial frequency is normalized by the per-axis Nyquist index, nu = 1
  at Nyquist, and coefficients are averaged over annuli obtained by
  rounding nu * bin_count; the DC term is excluded.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .color import PlanarImage


@dataclass(frozen=True)
class RadialSpectrum:
    """Binned radial spectrum; `power` holds log10 ratios for derived spectra.

    Bins that could not be evaluated are NaN and ignored by the fitters.
    """

    nu: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        if self.nu.shape != self.power.shape or self.nu.ndim != 1:
            raise ValueError("nu and power must be 1D arrays of equal length")
        if np.any(np.diff(self.nu) <= 0):
            raise ValueError("bin centers must be strictly increasing")

    @property
    def bin_count(self) -> int:
        return len(self.nu)


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    domain: tuple[float, float]


def _as_plane(img) -> np.ndarray:
    if isinstance(img, PlanarImage):
        if img.channels != 1:
            raise ValueError("expected a single-channel image")
        return img.plane(0)
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2D array")
    return arr


def normalized_frequency_grid(height: int, width: int) -> np.ndarray:
    """Per-coefficient radial frequency in Nyquist units, DFT layout."""
    ky = np.fft.fftfreq(height) * height / (height // 2)
    kx = np.fft.fftfreq(width) * width / (width // 2)
    return np.sqrt(ky[:, None] ** 2 + kx[None, :] ** 2)


@lru_cache(maxsize=16)
def _annulus_bins(height: int, width: int) -> tuple[np.ndarray, np.ndarray, int]:
    bin_count = min(height, width) // 2
    idx = np.rint(normalized_frequency_grid(height, width) * bin_count).astype(np.int64)
    idx[0, 0] = -1  # DC excluded
    valid = (idx >= 1) & (idx <= bin_count)
    idx.setflags(write=False)
    valid.setflags(write=False)
    return idx, valid, bin_count


def power_spectrum_2d(img) -> np.ndarray:
    """|F|^2 / (N*M) of the mean-subtracted image, DFT layout."""
    plane = _as_plane(img)
    f = np.fft.fft2(plane - plane.mean())
    return (f.real**2 + f.imag**2) / plane.size


def bin_radially(power2d: np.ndarray) -> RadialSpectrum:
    """Average a 2D power array over annuli of constant radial frequency."""
    idx, valid, bin_count = _annulus_bins(*power2d.shape)
    sums = np.bincount(idx[valid], weights=power2d[valid], minlength=bin_count + 1)
    counts = np.bincount(idx[valid], minlength=bin_count + 1)
    power = np.full(bin_count, np.nan)
    filled = counts[1:] > 0
    power[filled] = sums[1:][filled] / counts[1:][filled]
    centers = np.arange(1, bin_count + 1) / bin_count
    return RadialSpectrum(nu=centers, power=power)


def radial_power_spectrum(img) -> RadialSpectrum:
    """Radial power spectrum of a single-channel image (DC excluded)."""
    plane = _as_plane(img)
    if min(plane.shape) < 8:
        raise ValueError("image must be at least 8 pixels per side")
    return bin_radially(power_spectrum_2d(plane))


def log_relative_amplitude(sim: RadialSpectrum, original: RadialSpectrum,
                           eps: float = 1e-12) -> RadialSpectrum:
    """Per-bin log10(sim/original); bins with original power <= eps are NaN."""
    if sim.nu.shape != original.nu.shape or np.any(sim.nu != original.nu):
        raise ValueError("spectra are binned on different grids")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(original.power > eps, sim.power / original.power, np.nan)
        return RadialSpectrum(nu=sim.nu, power=np.log10(ratio))


def fit_log_slope(spec: RadialSpectrum, lo: float = 0.1, hi: float = 0.6) -> RegressionFit:
    """OLS line through the (already log-scaled) values on nu in [lo, hi]."""
    mask = (spec.nu >= lo) & (spec.nu <= hi) & np.isfinite(spec.power)
    if mask.sum() < 4:
        raise ValueError(f"need at least 4 valid bins in [{lo}, {hi}], have {int(mask.sum())}")
    slope, intercept = np.polyfit(spec.nu[mask], spec.power[mask], 1)
    return RegressionFit(slope=float(slope), intercept=float(intercept), domain=(lo, hi))


def write_csv(spec: RadialSpectrum, path, value_column: str = "power") -> None:
    """Write `nu,<value>` rows at full float precision; NaN bins are skipped."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"nu,{value_column}\n")
        for nu, value in zip(spec.nu, spec.power):
            if np.isfinite(value):
                fh.write(f"{float(nu)!r},{float(value)!r}\n")
