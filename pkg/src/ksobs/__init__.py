"""Sensor-based state observers for the 1-D Kuramoto-Sivashinsky equation."""

from .analysis import DecayFit, error_norm_series, export_csv, fit_decay_rate
from .config import RunSpec, parse_config
from .dynamics import ModelParams, SimulationConfig, TimeSeries, simulate
from .errors import (
    AliasingError,
    BlowUpError,
    ConfigError,
    ConstructionError,
    DomainError,
    KSObsError,
    RangeError,
    StepSizeError,
)
from .injection import InjectionOperator, build_injection, build_lambda
from .sensing import (
    REFERENCE_EIGHTHS,
    REFERENCE_QUARTERS,
    ReferenceSet,
    SensorSet,
    output_matrices,
    sensor_points,
    validate_reference_set,
)
from .spectral import QuadratureGrid, SpectralState, norm, project, spectrum

__version__ = "0.1.0"
