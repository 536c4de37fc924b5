"""Analysis phase: antigen counting, profile sums, anomaly metric, segmentation.

For each antigen type present in the output list the metric is the mean
presented profile, K = gamma / beta, where beta counts that type's records
and gamma sums their profiles. A type is labelled anomalous exactly when
K exceeds the threshold. The threshold is dataset-dependent configuration;
the library bakes in no default.

Segmented mode partitions the output record stream into consecutive chunks
of z records and analyses each chunk independently; a shorter final chunk is
emitted at end of stream and flagged partial. Segmentation is purely a
partition of the output list, so summing per-segment (beta, gamma) over all
segments reproduces the whole-run values per type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .engine import OutputRecord
from .errors import ConfigurationError

ANOMALOUS = "anomalous"
NORMAL = "normal"


@dataclass(frozen=True, slots=True)
class AntigenMetrics:
    """Per-type analysis row: counts, profile sum, metric, classification."""

    antigen: int
    beta: int
    gamma: float
    metric: float
    label: str


@dataclass(frozen=True, slots=True)
class AnomalyReport:
    """Whole-list (or per-segment) analysis, one entry per type, ascending id."""

    epsilon: float
    entries: tuple[AntigenMetrics, ...]

    def metric(self, antigen: int) -> float:
        for entry in self.entries:
            if entry.antigen == antigen:
                return entry.metric
        raise KeyError(f"antigen type {antigen} not present in report")

    def __contains__(self, antigen: int) -> bool:
        return any(entry.antigen == antigen for entry in self.entries)


@dataclass(frozen=True, slots=True)
class SegmentResult:
    index: int
    report: AnomalyReport
    partial: bool


def count_antigen(records: Iterable[OutputRecord], alpha: int) -> int:
    """Number of output records whose antigen type equals alpha."""
    return sum(1 for record in records if record.antigen == alpha)


def sum_profiles(records: Iterable[OutputRecord], alpha: int) -> float:
    """Sum of presented profiles over records of type alpha.

    Exactly-rounded summation keeps the result independent of record order.
    """
    return math.fsum(record.profile for record in records if record.antigen == alpha)


def anomaly_metrics(records: Iterable[OutputRecord], epsilon: float) -> AnomalyReport:
    """One metric entry per distinct antigen type in the record list."""
    profiles: dict[int, list[float]] = {}
    for record in records:
        profiles.setdefault(record.antigen, []).append(record.profile)
    entries = []
    for alpha in sorted(profiles):
        group = profiles[alpha]
        beta = len(group)
        gamma = math.fsum(group)
        metric = gamma / beta
        entries.append(
            AntigenMetrics(
                antigen=alpha,
                beta=beta,
                gamma=gamma,
                metric=metric,
                label=ANOMALOUS if metric > epsilon else NORMAL,
            )
        )
    return AnomalyReport(epsilon=epsilon, entries=tuple(entries))


def segmented_analysis(
    records: Iterable[OutputRecord],
    z: int,
    epsilon: float,
) -> Iterator[SegmentResult]:
    """Yield per-segment reports for consecutive chunks of z records.

    Works incrementally off any ordered record feed, so it can run while
    detection is still producing records. The final shorter chunk, if any,
    is emitted once the feed ends and is flagged partial.
    """
    if z < 1:
        raise ConfigurationError(f"segment size must be >= 1, got {z}")
    chunk: list[OutputRecord] = []
    index = 0
    for record in records:
        chunk.append(record)
        if len(chunk) == z:
            index += 1
            yield SegmentResult(index, anomaly_metrics(chunk, epsilon), partial=False)
            chunk = []
    if chunk:
        index += 1
        yield SegmentResult(index, anomaly_metrics(chunk, epsilon), partial=True)


REPORT_CSV_HEADER = "segment,antigen_id,beta,gamma,k_metric,label,partial"


def report_csv_rows(
    results: Sequence[SegmentResult] | AnomalyReport,
) -> list[str]:
    """Render reports as CSV rows; segment 0 means whole-run mode."""
    if isinstance(results, AnomalyReport):
        results = [SegmentResult(0, results, partial=False)]
    rows = [REPORT_CSV_HEADER]
    for seg in results:
        for e in seg.report.entries:
            rows.append(
                f"{seg.index},{e.antigen},{e.beta},{e.gamma!r},{e.metric!r},"
                f"{e.label},{int(seg.partial)}"
            )
    return rows
