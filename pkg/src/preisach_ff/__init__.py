"""Discretized Preisach hysteresis and a feedforward compensator that needs no model inverse."""

from .analysis import (FrequencyResponsePoint, LagApproximation, fundamental_phase, lag_F,
                       max_branch_slope, per_cycle_peak_error, sensitivity_hysteresis,
                       sensitivity_linear, slope_db_per_decade)
from .compensator import (Compensator, CompensatorConfig, FeedforwardResult, StabilityWarning,
                          StaticGain, run_feedforward)
from .density import GaussianParams, gaussian_density, uniform_density
from .preisach import (DensityGrid, InitMode, NumericalError, PreisachState, TriangularMesh,
                       build_mesh, init_state)
from .signals import SampledSignal, chirp_linear, sine, zigzag_growing

__all__ = [
    "Compensator", "CompensatorConfig", "DensityGrid", "FeedforwardResult",
    "FrequencyResponsePoint", "GaussianParams", "InitMode", "LagApproximation",
    "NumericalError", "PreisachState", "SampledSignal", "StabilityWarning", "StaticGain",
    "TriangularMesh", "build_mesh", "chirp_linear", "fundamental_phase", "gaussian_density",
    "init_state", "lag_F", "max_branch_slope", "per_cycle_peak_error", "run_feedforward",
    "sensitivity_hysteresis", "sensitivity_linear", "sine", "slope_db_per_decade",
    "uniform_density", "zigzag_growing",
]
