"""
spinshift: surface-induced shift of the electron magnetic moment near
dielectric, plasma and perfectly reflecting half-spaces.
"""

__version__ = "1.0.0"

from .constants import PINNED, PhysicalConstants
from .errors import (
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    NoPeakError,
    SpinShiftError,
    UsageError,
)
from .orientation import Orientation
from .materials import (
    LorentzDielectric,
    MaterialModel,
    NonDispersive,
    PerfectReflector,
    Plasma,
    epsilon_imaginary,
    reflection_te,
    reflection_te_real_axis,
    reflection_tm,
    static_mirror_coefficient,
)
from .quadrature import DEFAULT_CONFIG, EtaTransform, QuadratureConfig, UTransform
from .closed_forms import (
    nondispersive_closed,
    nondispersive_closed_mp,
    nondispersive_large_n,
    perfect_reflector,
    plasma_small_distance,
    plasma_small_distance_signed,
)
from .kernel import EvaluationPath, Query, ShiftResult, integrand_imaginary, shape_factor
from .analysis import (
    Experiment,
    SweepFamily,
    SweepSpec,
    enhancement_ratio,
    find_peak,
    limit_diagnostics,
    sweep,
)
from .export import ResultExporter, ShiftRequest, read_requests

__all__ = [
    "PINNED",
    "PhysicalConstants",
    "SpinShiftError",
    "UsageError",
    "DomainError",
    "ConfigError",
    "ConvergenceError",
    "CalibrationError",
    "NoPeakError",
    "Orientation",
    "MaterialModel",
    "NonDispersive",
    "Plasma",
    "LorentzDielectric",
    "PerfectReflector",
    "epsilon_imaginary",
    "static_mirror_coefficient",
    "reflection_te",
    "reflection_tm",
    "reflection_te_real_axis",
    "QuadratureConfig",
    "DEFAULT_CONFIG",
    "EtaTransform",
    "UTransform",
    "nondispersive_closed",
    "nondispersive_closed_mp",
    "nondispersive_large_n",
    "perfect_reflector",
    "plasma_small_distance",
    "plasma_small_distance_signed",
    "Query",
    "ShiftResult",
    "EvaluationPath",
    "integrand_imaginary",
    "shape_factor",
    "Experiment",
    "SweepFamily",
    "SweepSpec",
    "sweep",
    "find_peak",
    "enhancement_ratio",
    "limit_diagnostics",
    "ResultExporter",
    "ShiftRequest",
    "read_requests",
]
