"""Pilot-wave diffraction model: radiation patterns, well-trapping probabilities,
slit-width fits and a Monte-Carlo oracle."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    BeamThermo,
    ExperimentGeometry,
    GridSpec,
    ModelError,
    PatternCurve,
    PreconditionError,
    WaveKinematics,
    de_broglie,
    generate_pattern,
    modulated_wave,
    multi_slit_intensity,
    predict_blocked_slit,
    sed_probability,
    single_slit_intensity,
    standing_wave,
    theta_of_y,
    well_occupancy,
)
from .fitting import FitConfig, FitReport, chi2_objective, distinguishability_report, fit_width  # noqa: E402
