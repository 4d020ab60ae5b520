"""Radar-based sleep apnea detection.

From a complex radar echo, the package extracts chest displacement by phase
demodulation, isolates the respiratory band, takes a short-window RMS
amplitude envelope, fits a two-component Gaussian mixture per overlapping
time interval with hand-rolled EM, and averages per-interval apnea labels
into per-sample probabilities that are thresholded into events.  A synthetic
scenario generator, evaluation metrics against reference annotations, CSV
and JSON formats, and a CLI round out the toolkit.
"""

from .detector import (
    DetectionConfig,
    DetectionResult,
    Interval,
    IntervalGrid,
    average_labels,
    binarize,
    build_intervals,
    detect,
    enforce_min_duration,
    label_events,
)
from .errors import (
    ApneaRadarError,
    ConfigError,
    CoverageGap,
    IntervalLongerThanRecord,
    InvalidSpec,
    LengthMismatch,
    NonBinaryInput,
    NonUniformSampling,
    OverlapError,
    ParseError,
    SeriesTooShort,
    TooFewSamples,
    UnknownType,
    ZeroMagnitudeSample,
)
from .gmm import GmmFit, LabelRuleConfig, Responsibilities, fit_gmm_em, temporary_labels
from .io import (
    detection_from_dict,
    detection_to_dict,
    load_detection_config,
    load_scenario_spec,
    read_annotation,
    read_complex_series,
    read_scalar_series,
    read_sweep_grid,
    scenario_from_dict,
    write_annotation,
    write_complex_series,
    write_report,
    write_scalar_series,
    write_sweep_grid,
)
from .metrics import (
    AnnotationEvent,
    EvaluationReport,
    ReferenceAnnotation,
    ahi,
    evaluation_report,
    f1_score,
    optimize_threshold,
    pearson_correlation,
    type_threshold_correlation,
)
from .pipeline import (
    FilterConfig,
    amplitude_envelope,
    bandpass_respiration,
    envelope_from_echo,
    extract_displacement,
    hann_kernel,
    rectangular_kernel,
)
from .series import ComplexEchoSeries, ScalarSeries
from .synth import (
    ScenarioSpec,
    Segment,
    SweepGrid,
    bce_loss,
    generate_scenario,
    interval_responsibility_bce,
    reference_scenario,
    sweep_bce,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationEvent",
    "ApneaRadarError",
    "ComplexEchoSeries",
    "ConfigError",
    "CoverageGap",
    "DetectionConfig",
    "DetectionResult",
    "EvaluationReport",
    "FilterConfig",
    "GmmFit",
    "Interval",
    "IntervalGrid",
    "IntervalLongerThanRecord",
    "InvalidSpec",
    "LabelRuleConfig",
    "LengthMismatch",
    "NonBinaryInput",
    "NonUniformSampling",
    "OverlapError",
    "ParseError",
    "ReferenceAnnotation",
    "Responsibilities",
    "ScalarSeries",
    "ScenarioSpec",
    "Segment",
    "SeriesTooShort",
    "SweepGrid",
    "TooFewSamples",
    "UnknownType",
    "ZeroMagnitudeSample",
    "ahi",
    "amplitude_envelope",
    "average_labels",
    "bandpass_respiration",
    "bce_loss",
    "binarize",
    "build_intervals",
    "detect",
    "detection_from_dict",
    "detection_to_dict",
    "enforce_min_duration",
    "envelope_from_echo",
    "evaluation_report",
    "extract_displacement",
    "f1_score",
    "fit_gmm_em",
    "generate_scenario",
    "hann_kernel",
    "interval_responsibility_bce",
    "label_events",
    "load_detection_config",
    "load_scenario_spec",
    "optimize_threshold",
    "pearson_correlation",
    "read_annotation",
    "read_complex_series",
    "read_scalar_series",
    "read_sweep_grid",
    "rectangular_kernel",
    "reference_scenario",
    "scenario_from_dict",
    "sweep_bce",
    "temporary_labels",
    "type_threshold_correlation",
    "write_annotation",
    "write_complex_series",
    "write_report",
    "write_scalar_series",
    "write_sweep_grid",
]
