"""Delimited and figure output for the analyze command."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def write_slopes_csv(path, rows) -> None:
    """Rows of (d_cm, RegressionFit | None); missing fits become 'na'."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("d_cm,slope,intercept\n")
        for d, fit in rows:
            if fit is None:
                fh.write(f"{float(d)!r},na,na\n")
            else:
                fh.write(f"{float(d)!r},{fit.slope!r},{fit.intercept!r}\n")


def render_relative_spectra(path, curves, fit_window=(0.1, 0.6)) -> None:
    """Plot log10 relative power per distance with the fitted lines.

    `curves` holds (d_cm, RadialSpectrum of log ratios, RegressionFit | None).
    """
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    cmap = plt.get_cmap("viridis")
    for k, (d, spec, fit) in enumerate(curves):
        color = cmap(k / max(len(curves) - 1, 1))
        finite = np.isfinite(spec.power)
        if not finite.any():
            continue
        ax.plot(spec.nu[finite], spec.power[finite], color=color,
                linewidth=1.2, label=f"d={d:g} cm")
        if fit is not None:
            x = np.linspace(*fit_window, 32)
            ax.plot(x, fit.slope * x + fit.intercept, color=color,
                    linewidth=0.8, linestyle="--")
    ax.set_xlabel("normalized spatial frequency")
    ax.set_ylabel("log10 relative power")
    ax.set_xlim(0.0, 1.0)
    ax.axvspan(*fit_window, color="0.92", zorder=0)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_weight_grid(path, cache) -> None:
    """Plot calibrated band weights against viewing distance."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    distances = [e.distance_cm for e in cache.entries]
    weights = np.array([e.weights for e in cache.entries])
    for i in range(weights.shape[1]):
        lo, hi = cache.entries[0].band_intervals[i]
        ax.plot(distances, weights[:, i], marker="o", markersize=3,
                label=f"band {i + 1} ({lo:g}..{hi:g}]")
    ax.set_xlabel("viewing distance (cm)")
    ax.set_ylabel("band weight")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
