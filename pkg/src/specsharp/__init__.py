"""Spectral sharpening of color-mapped visualizations.

Calibrates per-octave band weights from white-noise spectral analysis of
a perceptual viewing surrogate, then sharpens images for a user-chosen
virtual viewing distance.
"""

from .calibration import (
    CacheError,
    CalibrationProblem,
    WeightCache,
    WeightSet,
    build_problem,
    calibrate_grid,
    objective,
    objective_gradient,
    solve_weights,
    weights_for,
)
from .color import (
    DecodeError,
    LumaChroma,
    PlanarImage,
    decode_to_linear,
    encode_to_srgb,
    recombine,
    split_luma_chroma,
)
from .perception import (
    TransferModel,
    ViewingGeometry,
    band_transfer_constant,
    nyquist_cpd,
    simulate,
    surrogate_simulator,
    transfer_at,
    white_noise,
)
from .pipeline import SharpenRequest, SharpenResult, sharpen, simulate_view
from .pyramid import BandStack, decompose, default_levels, recombine_weighted
from .spectral import (
    RadialSpectrum,
    RegressionFit,
    fit_log_slope,
    log_relative_amplitude,
    radial_power_spectrum,
)

__version__ = "0.1.0"
