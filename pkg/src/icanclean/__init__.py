"""Reference-noise artifact removal for multichannel recordings.

Finds the subspaces a corrupted recording shares with reference noise
channels via canonical correlation analysis and regresses them out.
Supports whole-record batch cleaning, sliding-window cleaning for transient
noise, and precomputed spatial filters for streaming application.
"""

from .cca import (
    CcaResult,
    canoncorr,
    estimate_rank,
    least_squares_solve,
    mean_center,
)
from .cleaning import (
    CleanConfig,
    CleanReport,
    ComponentSource,
    Selection,
    SpatialFilter,
    WindowDiagnostics,
    apply_spatial_filter,
    clean_batch,
    clean_sliding,
    fit_spatial_filter,
    min_window_samples,
    project_noise,
    select_bad_components,
)
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    IcanCleanError,
    InsufficientSamplesError,
    ParseError,
    ShapeError,
    ValidationError,
)
from .io import read_recording, write_recording
from .recording import Recording
from .synth import (
    SNR_DB_CAP,
    BenchmarkReport,
    BenchmarkSpec,
    CleaningScore,
    Scenario,
    ScenarioSpec,
    benchmark_throughput,
    build_scenario,
    generate_scenario,
    score_cleaning,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkReport",
    "BenchmarkSpec",
    "CcaResult",
    "CleanConfig",
    "CleanReport",
    "CleaningScore",
    "ComponentSource",
    "ConfigurationError",
    "DegenerateInputError",
    "IcanCleanError",
    "InsufficientSamplesError",
    "ParseError",
    "Recording",
    "SNR_DB_CAP",
    "Scenario",
    "ScenarioSpec",
    "Selection",
    "ShapeError",
    "SpatialFilter",
    "ValidationError",
    "WindowDiagnostics",
    "apply_spatial_filter",
    "benchmark_throughput",
    "build_scenario",
    "canoncorr",
    "clean_batch",
    "clean_sliding",
    "estimate_rank",
    "fit_spatial_filter",
    "generate_scenario",
    "least_squares_solve",
    "mean_center",
    "min_window_samples",
    "project_noise",
    "read_recording",
    "score_cleaning",
    "select_bad_components",
    "write_recording",
]
