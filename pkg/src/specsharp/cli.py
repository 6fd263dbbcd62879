"""Batch command-line entry points: calibrate, sharpen, simulate, analyze.

Exit codes: 0 success, 1 usage or I/O failure, 2 calibration finished
with convergence warnings (the cache is still written).
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from . import pngio, report
from .calibration import CacheError, WeightCache, calibrate_grid
from .color import DecodeError, PlanarImage, split_luma_chroma
from .perception import TransferModel, simulate, white_noise
from .pipeline import SharpenRequest, sharpen, simulate_view
from .spectral import (
    RadialSpectrum,
    fit_log_slope,
    log_relative_amplitude,
    radial_power_spectrum,
    write_csv,
)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _parse_grid(text: str) -> list[float]:
    try:
        if ".." in text:
            start_text, rest = text.split("..", 1)
            step = 10.0
            if ":" in rest:
                stop_text, step_text = rest.split(":", 1)
                step = float(step_text)
            else:
                stop_text = rest
            start, stop = float(start_text), float(stop_text)
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step))
            grid = [start + k * step for k in range(count + 1) if start + k * step <= stop + 1e-9]
        else:
            grid = [float(text)]
    except ValueError:
        _fail(f"cannot parse grid specification {text!r} (expected A..B:S, A..B or D)")
    if any(d <= 0 for d in grid):
        _fail("grid distances must be positive")
    return grid


def _load_model(slopes: str | None) -> TransferModel:
    if slopes is None:
        return TransferModel()
    try:
        return TransferModel.from_json(slopes)
    except (OSError, ValueError, KeyError) as exc:
        _fail(f"cannot load slope table {slopes}: {exc}")


def _load_cache(path: str | None) -> WeightCache:
    if not path:
        _fail("no weight cache given: pass --cache or set SPECSHARP_CACHE")
    if not Path(path).exists():
        _fail(f"weight cache {path} not found (run `specsharp calibrate` first)")
    try:
        return WeightCache.load(path)
    except CacheError as exc:
        _fail(str(exc))


@click.group()
def main():
    """Spectral sharpening of visualizations for a virtual viewing distance."""


@main.command()
@click.option("--grid", default="10..100:10", show_default=True,
              help="Distance grid in cm, A..B:S or a single value.")
@click.option("--levels", default=6, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--realizations", default=8, show_default=True, type=int,
              help="Noise images averaged per distance.")
@click.option("--noise-size", default=512, show_default=True, type=int)
@click.option("--slopes", type=click.Path(), default=None,
              help="JSON slope table replacing the built-in one.")
@click.option("--out", envvar="SPECSHARP_CACHE", default="weights.json",
              show_default=True, type=click.Path())
@click.option("--plot", type=click.Path(), default=None,
              help="Also render the weight-vs-distance figure to this file.")
def calibrate(grid, levels, seed, realizations, noise_size, slopes, out, plot):
    """Precompute band weights over a distance grid and write the cache."""
    model = _load_model(slopes)
    distances = _parse_grid(grid)
    try:
        cache = calibrate_grid(model, distances, levels, out_path=out,
                               noise_size=noise_size,
                               seeds=range(seed, seed + realizations))
    except (ValueError, CacheError) as exc:
        _fail(str(exc))
    if plot:
        report.render_weight_grid(plot, cache)
    stray = [e.distance_cm for e in cache.entries if not e.converged]
    click.echo(f"wrote {out} ({len(cache.entries)} distances, levels={cache.levels})")
    if stray:
        click.echo(f"warning: unconverged at d={stray}", err=True)
        sys.exit(2)


@main.command("sharpen")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--distance", required=True, type=float, help="Virtual viewing distance in cm.")
@click.option("--cache", envvar="SPECSHARP_CACHE", default=None, type=click.Path())
def sharpen_cmd(in_path, out_path, distance, cache):
    """Sharpen a PNG for a virtual viewing distance."""
    weight_cache = _load_cache(cache)
    try:
        image = pngio.read_image(in_path)
        result = sharpen(SharpenRequest(image=image, virtual_distance_cm=distance,
                                        cache=weight_cache))
        pngio.write_image(result.image, out_path)
    except (DecodeError, ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"clipped fraction: {result.clipped_fraction:.6f}", err=True)


@main.command("simulate")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--distance", required=True, type=float)
@click.option("--slopes", type=click.Path(), default=None)
def simulate_cmd(in_path, out_path, distance, slopes):
    """Preview what a viewer at the given distance retains of a PNG."""
    model = _load_model(slopes)
    if distance <= 0:
        _fail("distance must be positive")
    try:
        image = pngio.read_image(in_path)
        pngio.write_image(simulate_view(image, distance, model), out_path)
    except (DecodeError, ValueError, OSError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--in", "in_path", type=click.Path(), default=None,
              help="Analyze this image's luminance.")
@click.option("--noise", is_flag=True, help="Analyze synthetic white noise instead.")
@click.option("--grid", default="10..100:10", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--slopes", type=click.Path(), default=None)
@click.option("--size", default=512, show_default=True, type=int,
              help="Noise image size (noise mode only).")
@click.option("--realizations", default=8, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--fit-lo", default=0.1, show_default=True, type=float)
@click.option("--fit-hi", default=0.6, show_default=True, type=float)
def analyze(in_path, noise, grid, out_dir, slopes, size, realizations, seed,
            fit_lo, fit_hi):
    """Radial spectra, log relative amplitudes and fitted slopes per distance."""
    if noise == (in_path is not None):
        _fail("pass exactly one of --in FILE or --noise")
    model = _load_model(slopes)
    distances = _parse_grid(grid)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if noise:
            sources = [white_noise(size, size, seed + k).plane(0)
                       for k in range(realizations)]
        else:
            sources = [split_luma_chroma(pngio.read_image(in_path)).luminance.plane(0)]
        original = _mean_spectrum(sources)
        write_csv(original, out / "spectrum_original.csv")
        slope_rows = []
        curves = []
        for d in distances:
            simulated = _mean_spectrum(
                [simulate(model, d, PlanarImage.gray(s)).plane(0) for s in sources])
            write_csv(simulated, out / f"spectrum_d{d:g}.csv")
            rel = log_relative_amplitude(simulated, original)
            write_csv(rel, out / f"logrel_d{d:g}.csv", value_column="log_rel")
            try:
                fit = fit_log_slope(rel, fit_lo, fit_hi)
            except ValueError:
                fit = None
            slope_rows.append((d, fit))
            curves.append((d, rel, fit))
        report.write_slopes_csv(out / "slopes.csv", slope_rows)
        report.render_relative_spectra(out / "relative_spectra.png", curves,
                                       fit_window=(fit_lo, fit_hi))
    except (DecodeError, ValueError, OSError) as exc:
        _fail(str(exc))
    for d, fit in slope_rows:
        slope = "na" if fit is None else f"{fit.slope:+.3f}"
        click.echo(f"d={d:g} cm: slope {slope}")


def _mean_spectrum(planes) -> RadialSpectrum:
    total = None
    nu = None
    for plane in planes:
        spec = radial_power_spectrum(plane)
        nu = spec.nu
        total = spec.power if total is None else total + spec.power
    return RadialSpectrum(nu=nu, power=total / len(planes))


if __name__ == "__main__":
    main()
