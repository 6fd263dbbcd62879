"""Data-independent band-weight calibration per viewing distance.

For each band of a decomposed white-noise image we compare the radial
spectrum of the simulated band against the original band over the
mid-frequency window [a, b] (in Nyquist units) and solve

    minimize_w  dnu * sum_nu sum_i (w_i * A_i(nu) - B_i(nu))^2,  w_i >= 0

with projected Polak-Ribiere conjugate gradient and central-difference
gradients. A_i and B_i are stored as radial *amplitude* spectra (square
roots of the binned mean power): the weights multiply band images, i.e.
spectral amplitudes, so matching amplitudes is what makes the simulated
view of a compensated image reproduce the original's band-limited power.

The objective is separable per band, so a projected closed-form solution
exists; the test suite uses it as an independent oracle for this solver.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import pyramid
from .perception import Simulator, TransferModel, surrogate_simulator, white_noise
from .spectral import radial_power_spectrum

DEFAULT_DOMAIN = (0.05, 0.6)
DEFAULT_NOISE_SIZE = 512
DEFAULT_SEEDS = tuple(range(8))

_GRAD_TOL = 1e-8
_ARMIJO_C = 1e-4
_STEP_SCALE = 1e-4


class CacheError(RuntimeError):
    """Raised for unreadable, inconsistent, or unwritable weight caches."""


@dataclass(frozen=True)
class WeightSet:
    """Non-negative band weights for one virtual viewing distance.

    `weights` runs finest band first; the lowpass weight is implicitly 1
    and never stored.
    """

    distance_cm: float
    weights: tuple[float, ...]
    levels: int
    objective_value: float
    band_intervals: tuple[tuple[float, float], ...]
    converged: bool = True

    def __post_init__(self):
        if len(self.weights) != self.levels - 1:
            raise ValueError("weight count must be levels - 1")
        if any(w < 0 for w in self.weights):
            raise ValueError("band weights must be non-negative")


@dataclass(frozen=True)
class CalibrationProblem:
    """Band spectra restricted to the evaluation window, seed-averaged.

    `simulated` and `original` are (levels-1, bins) radial amplitude
    spectra (sqrt of mean power) of the simulated and original band
    noise; `dnu` is the bin width of the discretized integral.
    """

    distance_cm: float
    levels: int
    nu: np.ndarray
    simulated: np.ndarray
    original: np.ndarray
    dnu: float
    band_intervals: tuple[tuple[float, float], ...]


def build_problem(model: TransferModel, d: float, levels: int,
                  noise_size: int = DEFAULT_NOISE_SIZE,
                  seeds=DEFAULT_SEEDS,
                  domain: tuple[float, float] = DEFAULT_DOMAIN,
                  simulator: Simulator | None = None) -> CalibrationProblem:
    """Decompose white noise, simulate each band at d, bin both spectra.

    Power spectra are averaged over the seed list before the square root
    is taken.
    """
    if noise_size < 64:
        raise ValueError("noise_size must be at least 64")
    if levels < 2:
        raise ValueError("levels must be at least 2")
    seeds = tuple(seeds)
    if not seeds:
        raise ValueError("need at least one noise seed")
    if simulator is None:
        simulator = surrogate_simulator(model)
    a, b = domain
    sim_power = None
    orig_power = None
    nu = None
    for seed in seeds:
        noise = white_noise(noise_size, noise_size, seed)
        stack = pyramid.decompose(noise, levels)
        for i, band in enumerate(stack.bands):
            spec_orig = radial_power_spectrum(band)
            spec_sim = radial_power_spectrum(simulator(band, d))
            if nu is None:
                window = (spec_orig.nu >= a) & (spec_orig.nu <= b)
                nu = spec_orig.nu[window]
                sim_power = np.zeros((levels - 1, len(nu)))
                orig_power = np.zeros_like(sim_power)
            sim_power[i] += spec_sim.power[window]
            orig_power[i] += spec_orig.power[window]
    sim_power /= len(seeds)
    orig_power /= len(seeds)
    return CalibrationProblem(
        distance_cm=d,
        levels=levels,
        nu=nu,
        simulated=np.sqrt(sim_power),
        original=np.sqrt(orig_power),
        dnu=2.0 / noise_size,
        band_intervals=pyramid.band_intervals(levels),
    )


def _raw_objective(problem: CalibrationProblem, weights: np.ndarray) -> float:
    resid = weights[:, None] * problem.simulated - problem.original
    return problem.dnu * float(np.sum(resid * resid))


def objective(problem: CalibrationProblem, weights) -> float:
    """dnu * sum over bins and bands of (w_i A_i - B_i)^2."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (problem.levels - 1,):
        raise ValueError(f"expected {problem.levels - 1} weights, got {w.shape}")
    if np.any(w < 0):
        raise ValueError("band weights must be non-negative")
    return _raw_objective(problem, w)


def objective_gradient(problem: CalibrationProblem, weights) -> np.ndarray:
    """Analytic separable gradient, 2*dnu*sum_nu A_i*(w_i A_i - B_i)."""
    w = np.asarray(weights, dtype=np.float64)
    resid = w[:, None] * problem.simulated - problem.original
    return 2.0 * problem.dnu * np.sum(problem.simulated * resid, axis=1)


def _central_gradient(problem: CalibrationProblem, w: np.ndarray) -> np.ndarray:
    g = np.empty_like(w)
    for j in range(len(w)):
        h = _STEP_SCALE * max(1.0, abs(w[j]))
        forward = w.copy()
        forward[j] += h
        backward = w.copy()
        backward[j] -= h
        g[j] = (_raw_objective(problem, forward) - _raw_objective(problem, backward)) / (2.0 * h)
    return g


def _trial_step(problem, w, direction, p0, slope):
    # The objective is quadratic, so a second difference along the
    # direction gives the exact curvature and the exact minimizing step.
    norm = float(np.linalg.norm(direction))
    delta = 1e-3 * (1.0 + float(np.linalg.norm(w))) / norm
    plus = _raw_objective(problem, w + delta * direction)
    minus = _raw_objective(problem, w - delta * direction)
    curvature = (plus - 2.0 * p0 + minus) / (delta * delta)
    if curvature <= 0.0:
        return 1.0
    return max(-slope / curvature, 1e-12)


def solve_weights(problem: CalibrationProblem, init=None,
                  max_iterations: int = 500) -> WeightSet:
    """Projected Polak-Ribiere CG on the calibration objective.

    Negative components are projected to zero after every line-search
    step and the search direction resets to steepest descent whenever a
    projection occurred. Stops on |delta p| < 1e-10*(1+p), gradient
    inf-norm < 1e-8, or `max_iterations` (then flagged unconverged).
    """
    n = problem.levels - 1
    w = np.ones(n) if init is None else np.asarray(init, dtype=np.float64).copy()
    if w.shape != (n,):
        raise ValueError(f"init must hold {n} weights")
    if np.any(w < 0):
        raise ValueError("initial weights must be non-negative")
    p = _raw_objective(problem, w)
    g = _central_gradient(problem, w)
    direction = -g
    converged = bool(np.max(np.abs(g)) < _GRAD_TOL)
    iterations = 0
    while not converged and iterations < max_iterations:
        iterations += 1
        slope = float(g @ direction)
        if slope >= 0.0:
            direction = -g
            slope = float(g @ direction)
            if slope == 0.0:
                converged = True
                break
        alpha = _trial_step(problem, w, direction, p, slope)
        w_new = w
        p_new = p
        for _ in range(60):
            w_new = np.maximum(0.0, w + alpha * direction)
            p_new = _raw_objective(problem, w_new)
            if p_new <= p + _ARMIJO_C * float(g @ (w_new - w)):
                break
            alpha *= 0.5
        projected = bool(np.any(w + alpha * direction < 0.0))
        delta_p = p - p_new
        g_new = _central_gradient(problem, w_new)
        w = w_new
        if abs(delta_p) < 1e-10 * (1.0 + p_new) or np.max(np.abs(g_new)) < _GRAD_TOL:
            p = p_new
            g = g_new
            converged = True
            break
        if projected:
            direction = -g_new
        else:
            beta = max(0.0, float(g_new @ (g_new - g)) / float(g @ g))
            direction = -g_new + beta * direction
        p = p_new
        g = g_new
    return WeightSet(
        distance_cm=problem.distance_cm,
        weights=tuple(float(v) for v in w),
        levels=problem.levels,
        objective_value=p,
        band_intervals=problem.band_intervals,
        converged=converged,
    )


@dataclass(frozen=True)
class WeightCache:
    """Precomputed weight sets over a distance grid, one levels value."""

    levels: int
    a: float
    b: float
    model_hash: str
    entries: tuple[WeightSet, ...]

    def __post_init__(self):
        if not self.entries:
            raise CacheError("weight cache has no entries")
        if any(e.levels != self.levels for e in self.entries):
            raise CacheError("cache corrupt: entries disagree on levels")
        ds = [e.distance_cm for e in self.entries]
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise CacheError("cache corrupt: distances not strictly ascending")

    def matches_model(self, model: TransferModel) -> bool:
        return self.model_hash == model.content_hash()

    def to_json(self) -> str:
        payload = {
            "levels": self.levels,
            "a": self.a,
            "b": self.b,
            "model_hash": self.model_hash,
            "entries": [
                {
                    "d_cm": e.distance_cm,
                    "weights": list(e.weights),
                    "objective": e.objective_value,
                    "converged": e.converged,
                }
                for e in self.entries
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(self.to_json())
        except OSError as exc:
            raise CacheError(f"cannot write weight cache {path}: {exc}") from exc

    @classmethod
    def load(cls, path) -> "WeightCache":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise CacheError(f"cannot read weight cache {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CacheError(f"weight cache {path} is not valid JSON: {exc}") from exc
        levels = int(payload["levels"])
        intervals = pyramid.band_intervals(levels)
        entries = []
        for item in payload["entries"]:
            weights = tuple(float(v) for v in item["weights"])
            if len(weights) != levels - 1:
                raise CacheError("cache corrupt: weight count disagrees with levels")
            entries.append(WeightSet(
                distance_cm=float(item["d_cm"]),
                weights=weights,
                levels=levels,
                objective_value=float(item["objective"]),
                band_intervals=intervals,
                converged=bool(item["converged"]),
            ))
        return cls(
            levels=levels,
            a=float(payload["a"]),
            b=float(payload["b"]),
            model_hash=str(payload["model_hash"]),
            entries=tuple(entries),
        )


def calibrate_grid(model: TransferModel, distances, levels: int,
                   out_path=None,
                   noise_size: int = DEFAULT_NOISE_SIZE,
                   seeds=DEFAULT_SEEDS,
                   domain: tuple[float, float] = DEFAULT_DOMAIN,
                   simulator: Simulator | None = None) -> WeightCache:
    """Solve weights for every distance and optionally write the cache file."""
    distances = [float(d) for d in distances]
    if not distances:
        raise ValueError("distance grid is empty")
    if any(d <= 0 for d in distances):
        raise ValueError("all grid distances must be positive")
    if any(b <= a for a, b in zip(distances, distances[1:])):
        raise ValueError("distance grid must be strictly ascending")
    entries = []
    for d in distances:
        problem = build_problem(model, d, levels, noise_size=noise_size,
                                seeds=seeds, domain=domain, simulator=simulator)
        entries.append(solve_weights(problem))
    cache = WeightCache(
        levels=levels,
        a=domain[0],
        b=domain[1],
        model_hash=model.content_hash(),
        entries=tuple(entries),
    )
    if out_path is not None:
        cache.save(out_path)
    return cache


def weights_for(cache: WeightCache, d: float) -> WeightSet:
    """Per-band linear interpolation between the bracketing grid entries.

    Below the grid the weights interpolate toward the identity (all ones
    at d=0); above the grid they clamp to the last entry.
    """
    if d <= 0:
        raise ValueError("viewing distance must be positive")
    entries = cache.entries
    if d >= entries[-1].distance_cm:
        return entries[-1]
    intervals = pyramid.band_intervals(cache.levels)
    identity = WeightSet(
        distance_cm=0.0,
        weights=(1.0,) * (cache.levels - 1),
        levels=cache.levels,
        objective_value=0.0,
        band_intervals=intervals,
        converged=True,
    )
    lower = identity
    for upper in entries:
        if d <= upper.distance_cm:
            break
        lower = upper
    if d == upper.distance_cm:
        return upper
    t = (d - lower.distance_cm) / (upper.distance_cm - lower.distance_cm)
    blend = tuple(
        (1.0 - t) * wl + t * wu for wl, wu in zip(lower.weights, upper.weights)
    )
    return WeightSet(
        distance_cm=d,
        weights=blend,
        levels=cache.levels,
        objective_value=(1.0 - t) * lower.objective_value + t * upper.objective_value,
        band_intervals=intervals,
        converged=lower.converged and upper.converged,
    )
