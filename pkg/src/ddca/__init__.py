"""Streaming anomaly detection with a deterministic dendritic-cell population.

The package splits into the input data model, the detection engine, the
analysis phase (whole-run and segmented), closed-form runtime estimators with
matching measurements, exact operation-count instrumentation, and a synthetic
stream generator, tied together by the ``ddca`` command-line tool.
"""

from .analysis import (
    AnomalyReport,
    AntigenMetrics,
    SegmentResult,
    anomaly_metrics,
    count_antigen,
    segmented_analysis,
    sum_profiles,
)
from .data_model import (
    AntigenType,
    InputEvent,
    SignalVector,
    StreamStats,
    WeightMatrix,
    compute_stats,
    default_weights,
    parse_stream,
    parse_weights,
    serialize_stream,
    validate_weights,
)
from .engine import (
    ArithmeticLifespans,
    DendriticCell,
    EngineConfig,
    EngineState,
    GaussianLifespans,
    OutputRecord,
    OutputSignals,
    RunTrace,
    flush_remaining,
    initialise,
    run_detection,
    step,
    transform_signal,
)
from .estimators import (
    MaturedBand,
    MaturedPoint,
    ProcessedAntigenEstimate,
    TimeInterval,
    estimate_matured_gaussian,
    estimate_matured_uniform,
    estimate_processed_antigens,
    measure_matured,
    measure_processed_antigens,
    processed_antigens_oracle,
    sequential_fill,
)
from .instrumentation import (
    ClosedFormTotals,
    InstrumentedRun,
    OpCounters,
    PhaseTotals,
    ScalingResult,
    closed_form_totals,
    instrumented_run,
    phase_totals,
    scaling_experiment,
    worst_case_events,
)
from .synthetic import SynthSpec, generate_events

__version__ = "0.1.0"

__all__ = [
    "AnomalyReport",
    "AntigenMetrics",
    "AntigenType",
    "ArithmeticLifespans",
    "ClosedFormTotals",
    "DendriticCell",
    "EngineConfig",
    "EngineState",
    "GaussianLifespans",
    "InputEvent",
    "InstrumentedRun",
    "MaturedBand",
    "MaturedPoint",
    "OpCounters",
    "OutputRecord",
    "OutputSignals",
    "PhaseTotals",
    "ProcessedAntigenEstimate",
    "RunTrace",
    "ScalingResult",
    "SegmentResult",
    "SignalVector",
    "StreamStats",
    "SynthSpec",
    "TimeInterval",
    "WeightMatrix",
    "anomaly_metrics",
    "closed_form_totals",
    "compute_stats",
    "count_antigen",
    "default_weights",
    "estimate_matured_gaussian",
    "estimate_matured_uniform",
    "estimate_processed_antigens",
    "flush_remaining",
    "generate_events",
    "initialise",
    "instrumented_run",
    "measure_matured",
    "measure_processed_antigens",
    "parse_stream",
    "parse_weights",
    "phase_totals",
    "processed_antigens_oracle",
    "run_detection",
    "scaling_experiment",
    "segmented_analysis",
    "sequential_fill",
    "serialize_stream",
    "step",
    "sum_profiles",
    "transform_signal",
    "validate_weights",
    "worst_case_events",
]
