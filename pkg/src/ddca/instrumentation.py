"""Exact operation counting and empirical complexity validation.

Counters are bumped at the control points of the detection algorithm's
pseudocode, counting loop iterations as whole steps. Per population sweep
over cells the four per-cell lines (lifespan update, profile update,
maturation guard, output record) each count N, with the guarded output line
counted as if unconditional; that makes the detection-phase total an exact
function of the stream shape, t2 = n + 3a + 2(n-a) + 5(n-a)N, independent of
signal values. Actual record emissions are reported separately.

The analysis phase counts one outer iteration per output record and one
iteration per (record, type) pair for each of the type loop, the antigen
counter, the profile abstraction and the metric calculation. Its measured
total is therefore L + 4*L*b_L for an output list of L records over b_L
types, bounded by the worst case a + 4ab reached when every antigen is
presented and every type is distinct.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .analysis import AnomalyReport, SegmentResult, anomaly_metrics, segmented_analysis
from .data_model import AntigenType, InputEvent, SignalVector, StreamStats
from .engine import EngineConfig, EngineState, OutputRecord, flush_remaining, initialise, step
from .errors import ConfigurationError


@dataclass(slots=True)
class OpCounters:
    """One exact counter per counted pseudocode line."""

    init_loop: int = 0
    dc_init: int = 0
    detect_loop: int = 0
    antigen_if: int = 0
    select_dc: int = 0
    antigen_update: int = 0
    signal_if: int = 0
    signal_transform: int = 0
    cell_loop: int = 0
    lifespan_update: int = 0
    profile_update: int = 0
    mature_if: int = 0
    output_record: int = 0
    analysis_loop: int = 0
    type_loop: int = 0
    antigen_counter: int = 0
    profile_abstraction: int = 0
    metric_calc: int = 0

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True, slots=True)
class PhaseTotals:
    """Measured per-phase operation totals."""

    t1: int
    t2: int
    t3: int

    @property
    def total(self) -> int:
        return self.t1 + self.t2 + self.t3


@dataclass(frozen=True, slots=True)
class ClosedFormTotals:
    """Closed-form phase totals derived from stream shape alone."""

    t1: int
    t2: int
    t3_bound: int


def phase_totals(counters: OpCounters) -> PhaseTotals:
    t1 = counters.init_loop + counters.dc_init
    t2 = (
        counters.detect_loop
        + counters.antigen_if
        + counters.select_dc
        + counters.antigen_update
        + counters.signal_if
        + counters.signal_transform
        + counters.cell_loop
        + counters.lifespan_update
        + counters.profile_update
        + counters.mature_if
        + counters.output_record
    )
    t3 = (
        counters.analysis_loop
        + counters.type_loop
        + counters.antigen_counter
        + counters.profile_abstraction
        + counters.metric_calc
    )
    return PhaseTotals(t1=t1, t2=t2, t3=t3)


def closed_form_totals(stats: StreamStats, n_cells: int) -> ClosedFormTotals:
    n, a, b = stats.n, stats.a, stats.b
    return ClosedFormTotals(
        t1=2 * n_cells,
        t2=n + 3 * a + 2 * (n - a) + 5 * (n - a) * n_cells,
        t3_bound=a + 4 * a * b,
    )


@dataclass(slots=True)
class InstrumentedRun:
    """Everything an instrumented run produces."""

    output: list[OutputRecord]
    counters: OpCounters
    totals: PhaseTotals
    stats: StreamStats
    state: EngineState
    report: Optional[AnomalyReport] = None
    segments: Optional[list[SegmentResult]] = None
    # (records, distinct types) per analysed chunk; one entry in whole-run mode.
    analysis_chunks: list[tuple[int, int]] = field(default_factory=list)

    @property
    def records_emitted(self) -> int:
        return len(self.output)


def instrumented_run(
    events: Iterable[InputEvent],
    config: EngineConfig,
    *,
    segment_size: Optional[int] = None,
    epsilon: float = 0.0,
) -> InstrumentedRun:
    """Run detection plus analysis with exact operation counters.

    ``segment_size=None`` analyses the whole output list in one pass;
    otherwise the list is partitioned into chunks of that many records and
    each chunk is analysed independently.
    """
    ops = OpCounters()
    n_cells = config.n_cells

    ops.init_loop += n_cells
    ops.dc_init += n_cells
    state = initialise(n_cells, config.lifespans, trace=config.trace)

    n = 0
    a = 0
    types_seen: set[int] = set()
    for event in events:
        ops.detect_loop += 1
        n += 1
        if isinstance(event.payload, AntigenType):
            ops.antigen_if += 1
            ops.select_dc += 1
            ops.antigen_update += 1
            a += 1
            types_seen.add(event.payload.id)
        else:
            ops.signal_if += 1
            ops.signal_transform += 1
            ops.cell_loop += n_cells
            ops.lifespan_update += n_cells
            ops.profile_update += n_cells
            ops.mature_if += n_cells
            ops.output_record += n_cells
        step(state, event, config.weights)

    if config.flush_at_end:
        flush_remaining(state)

    records = state.records
    report: Optional[AnomalyReport] = None
    segments: Optional[list[SegmentResult]] = None
    chunks: list[tuple[int, int]] = []
    if segment_size is None:
        report = anomaly_metrics(records, epsilon)
        chunks.append((len(records), len(report.entries)))
    else:
        segments = list(segmented_analysis(records, segment_size, epsilon))
        for seg in segments:
            chunk_records = sum(e.beta for e in seg.report.entries)
            chunks.append((chunk_records, len(seg.report.entries)))

    for chunk_records, chunk_types in chunks:
        ops.analysis_loop += chunk_records
        pairs = chunk_records * chunk_types
        ops.type_loop += pairs
        ops.antigen_counter += pairs
        ops.profile_abstraction += pairs
        ops.metric_calc += pairs

    stats = StreamStats(n=n, a=a, b=len(types_seen))
    return InstrumentedRun(
        output=records,
        counters=ops,
        totals=phase_totals(ops),
        stats=stats,
        state=state,
        report=report,
        segments=segments,
        analysis_chunks=chunks,
    )


def worst_case_events(
    n: int,
    antigen_fraction: float = 0.5,
    m: int = 3,
    signal_level: float = 0.5,
) -> Iterator[InputEvent]:
    """Complexity worst-case stream: every antigen id distinct (b = a).

    Antigen rows are spread evenly through the stream; signal rows repeat a
    constant vector (counter values do not depend on signal content).
    """
    if n < 0:
        raise ConfigurationError(f"stream size must be >= 0, got {n}")
    if not 0.0 <= antigen_fraction <= 1.0:
        raise ConfigurationError(f"antigen fraction must be in [0, 1], got {antigen_fraction}")
    a = round(n * antigen_fraction)
    signal = SignalVector((signal_level,) * m)
    emitted_antigens = 0
    for t in range(1, n + 1):
        due = (t * a) // n if n else 0
        if emitted_antigens < due:
            emitted_antigens += 1
            yield InputEvent(t, AntigenType(emitted_antigens))
        else:
            yield InputEvent(t, signal)


@dataclass(frozen=True, slots=True)
class ScalingRow:
    n: int
    a: int
    b: int
    n_cells: int
    z: Optional[int]
    t1: int
    t2: int
    t3: int
    total: int
    t1_formula: int
    t2_formula: int
    t3_bound: int
    sum_ak_bk: int
    segment_product_bound: Optional[int]


@dataclass(frozen=True, slots=True)
class ScalingResult:
    mode: str
    slope: float
    rows: tuple[ScalingRow, ...]


def scaling_experiment(
    sizes: Sequence[int],
    mode: str = "standard",
    *,
    config: EngineConfig,
    antigen_fraction: float = 0.5,
    segment_size: int = 100,
    epsilon: float = 0.0,
) -> ScalingResult:
    """Run instrumented worst-case streams per size and fit the log-log slope.

    Requires at least four sizes spanning at least two decades. Runs use the
    end-of-stream flush so the output list realises the full worst case.
    """
    if mode not in ("standard", "segmented"):
        raise ConfigurationError(f"mode must be 'standard' or 'segmented', got {mode!r}")
    if len(sizes) < 4:
        raise ConfigurationError(f"need at least 4 sizes, got {len(sizes)}")
    if min(sizes) < 1:
        raise ConfigurationError("sizes must be positive")
    if max(sizes) / min(sizes) < 100:
        raise ConfigurationError("sizes must span at least two decades")

    run_config = EngineConfig(
        weights=config.weights,
        n_cells=config.n_cells,
        lifespans=config.lifespans,
        flush_at_end=True,
        trace=False,
    )
    z = segment_size if mode == "segmented" else None
    rows = []
    for n in sorted(sizes):
        events = worst_case_events(n, antigen_fraction, m=config.weights.dim)
        run = instrumented_run(events, run_config, segment_size=z, epsilon=epsilon)
        forms = closed_form_totals(run.stats, config.n_cells)
        sum_ak_bk = sum(r * t for r, t in run.analysis_chunks)
        bound = math.ceil(n / z) * z * z if z is not None else None
        rows.append(
            ScalingRow(
                n=run.stats.n,
                a=run.stats.a,
                b=run.stats.b,
                n_cells=config.n_cells,
                z=z,
                t1=run.totals.t1,
                t2=run.totals.t2,
                t3=run.totals.t3,
                total=run.totals.total,
                t1_formula=forms.t1,
                t2_formula=forms.t2,
                t3_bound=forms.t3_bound,
                sum_ak_bk=sum_ak_bk,
                segment_product_bound=bound,
            )
        )

    log_n = np.log10([row.n for row in rows])
    log_total = np.log10([row.total for row in rows])
    slope = float(np.polyfit(log_n, log_total, 1)[0])
    return ScalingResult(mode=mode, slope=slope, rows=tuple(rows))
