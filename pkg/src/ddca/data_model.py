"""Input-stream data model: events, weights, stream statistics, parsing.

A stream is a UTF-8 CSV file with one event per row, in time order. Time is
implicit in row order: row k is tick k (explicit timestamps in the file are
rejected). Row forms:

    signal,v1,v2,...,vm
    antigen,<id>

Lines starting with ``#`` are comments; blank lines are ignored. A weight
matrix file holds two CSV rows of m numbers each: the CSM row first, the K
row second.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

from .errors import (
    ConfigurationError,
    DimensionalityError,
    DomainError,
    StreamFormatError,
)

logger = logging.getLogger(__name__)

#: Default signal dimensionality (PAMP, Danger, Safe).
DEFAULT_SIGNAL_DIM = 3

#: Shipped default weight rows for m=3. These are configuration, not ground
#: truth: the CSM row weighs every category equally, the K row lets the Safe
#: component suppress the other two.
DEFAULT_WEIGHT_ROWS = ((1.0, 1.0, 1.0), (1.0, 1.0, -1.0))


@dataclass(frozen=True, slots=True)
class SignalVector:
    """An m-dimensional real-valued signal sample."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise DimensionalityError("signal vector must have at least one component")
        for v in self.values:
            if not math.isfinite(v):
                raise DomainError(f"signal component is not finite: {v!r}")

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass(frozen=True, slots=True)
class AntigenType:
    """Categorical identifier of an entity to classify. Order is ignored."""

    id: int

    def __post_init__(self):
        if self.id < 1:
            raise DomainError(f"antigen id must be >= 1, got {self.id}")


@dataclass(frozen=True, slots=True)
class InputEvent:
    """One time step of the input stream: a signal vector or an antigen id."""

    time: int
    payload: Union[SignalVector, AntigenType]

    def __post_init__(self):
        if self.time < 1:
            raise DomainError(f"event time must be >= 1, got {self.time}")
        if not isinstance(self.payload, (SignalVector, AntigenType)):
            raise TypeError(f"payload must be SignalVector or AntigenType, got {type(self.payload)!r}")

    @property
    def is_antigen(self) -> bool:
        return isinstance(self.payload, AntigenType)

    @property
    def is_signal(self) -> bool:
        return isinstance(self.payload, SignalVector)


@dataclass(frozen=True, slots=True)
class WeightMatrix:
    """2 x m transformation weights: row one produces CSM, row two produces K."""

    csm_row: tuple[float, ...]
    k_row: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.csm_row)


@dataclass(frozen=True, slots=True)
class StreamStats:
    """Aggregate stream counts: total events n, antigen events a, distinct types b."""

    n: int
    a: int
    b: int

    def __post_init__(self):
        if not (0 <= self.a <= self.n):
            raise DomainError(f"antigen count a={self.a} outside [0, n={self.n}]")
        if self.a == 0 and self.b != 0:
            raise DomainError("b must be 0 when the stream has no antigen events")
        if self.a >= 1 and not (1 <= self.b <= self.a):
            raise DomainError(f"type count b={self.b} outside [1, a={self.a}]")


def validate_weights(weights: WeightMatrix, m: int) -> WeightMatrix:
    """Check weight-row arity against m and reject non-finite entries."""
    if m < 1:
        raise ConfigurationError(f"signal dimensionality must be >= 1, got {m}")
    for name, row in (("CSM", weights.csm_row), ("K", weights.k_row)):
        if len(row) != m:
            raise ConfigurationError(
                f"{name} weight row has {len(row)} entries, expected {m}"
            )
        for w in row:
            if not math.isfinite(w):
                raise ConfigurationError(f"{name} weight row contains non-finite entry {w!r}")
    return weights


def default_weights(m: int = DEFAULT_SIGNAL_DIM) -> WeightMatrix:
    """Built-in weights; only defined for the standard three-signal case."""
    if m != DEFAULT_SIGNAL_DIM:
        raise ConfigurationError(
            f"no default weights for m={m}; supply a weights file"
        )
    return WeightMatrix(DEFAULT_WEIGHT_ROWS[0], DEFAULT_WEIGHT_ROWS[1])


Source = Union[str, Path, IO[str], IO[bytes], Iterable[str]]


def _iter_lines(source: Source) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            yield from fh
        return
    if isinstance(source, io.TextIOBase):
        yield from source
        return
    for line in source:
        if isinstance(line, bytes):
            yield line.decode("utf-8")
        else:
            yield line


def _parse_float(cell: str, line_no: int, what: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise StreamFormatError(line_no, f"{what} is not a number: {cell!r}") from None
    if not math.isfinite(value):
        raise StreamFormatError(line_no, f"{what} is not finite: {cell!r}")
    return value


def parse_stream(
    source: Source,
    m: int = DEFAULT_SIGNAL_DIM,
    *,
    strict_unit_range: bool = False,
) -> tuple[list[InputEvent], StreamStats]:
    """Parse a stream file into events with ticks 1..n plus its statistics.

    Signal components outside [0, 1] are accepted with a logged warning by
    default; ``strict_unit_range=True`` rejects them instead.
    """
    if m < 1:
        raise ConfigurationError(f"signal dimensionality must be >= 1, got {m}")

    events: list[InputEvent] = []
    antigen_count = 0
    type_ids: set[int] = set()
    range_warned = False

    reader = csv.reader(_iter_lines(source))
    for row in reader:
        line_no = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        kind = row[0].strip()
        if kind.startswith("#"):
            continue
        cells = [c.strip() for c in row[1:]]

        if kind == "signal":
            if len(cells) != m:
                raise DimensionalityError(
                    f"line {line_no}: signal row has {len(cells)} components, expected {m}"
                )
            values = tuple(
                _parse_float(c, line_no, f"signal component {j + 1}") for j, c in enumerate(cells)
            )
            out_of_range = [v for v in values if not 0.0 <= v <= 1.0]
            if out_of_range:
                if strict_unit_range:
                    raise DomainError(
                        f"line {line_no}: signal components outside [0, 1]: {out_of_range}"
                    )
                if not range_warned:
                    logger.warning(
                        "signal components outside [0, 1] at line %d (first occurrence); "
                        "values are accepted as-is",
                        line_no,
                    )
                    range_warned = True
            payload: Union[SignalVector, AntigenType] = SignalVector(values)
        elif kind == "antigen":
            if len(cells) != 1:
                raise StreamFormatError(line_no, f"antigen row needs exactly one id, got {len(cells)} cells")
            try:
                antigen_id = int(cells[0])
            except ValueError:
                raise StreamFormatError(line_no, f"antigen id is not an integer: {cells[0]!r}") from None
            if antigen_id < 1:
                raise DomainError(f"line {line_no}: antigen id must be >= 1, got {antigen_id}")
            payload = AntigenType(antigen_id)
            antigen_count += 1
            type_ids.add(antigen_id)
        else:
            raise StreamFormatError(
                line_no,
                f"unknown row kind {kind!r} (rows must start with 'signal' or 'antigen'; "
                "time is implicit in row order)",
            )

        events.append(InputEvent(len(events) + 1, payload))

    stats = StreamStats(n=len(events), a=antigen_count, b=len(type_ids))
    return events, stats


def compute_stats(events: Iterable[InputEvent]) -> StreamStats:
    """Recount stream statistics from an event sequence."""
    n = 0
    a = 0
    types: set[int] = set()
    for event in events:
        n += 1
        if event.is_antigen:
            a += 1
            types.add(event.payload.id)
    return StreamStats(n=n, a=a, b=len(types))


def _fmt(value: float) -> str:
    # repr() gives the shortest round-tripping decimal form in Python 3.
    return repr(float(value))


def serialize_stream(events: Iterable[InputEvent]) -> str:
    """Render events back to the canonical CSV stream form."""
    lines = []
    for event in events:
        if event.is_antigen:
            lines.append(f"antigen,{event.payload.id}")
        else:
            lines.append("signal," + ",".join(_fmt(v) for v in event.payload.values))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_weights(source: Source, m: int) -> WeightMatrix:
    """Load a weight matrix from a two-row CSV file (CSM row, then K row)."""
    rows: list[tuple[float, ...]] = []
    reader = csv.reader(_iter_lines(source))
    for row in reader:
        line_no = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if row[0].strip().startswith("#"):
            continue
        rows.append(tuple(_parse_float(c.strip(), line_no, "weight") for c in row))
    if len(rows) != 2:
        raise ConfigurationError(f"weights file must hold exactly 2 rows, found {len(rows)}")
    return validate_weights(WeightMatrix(rows[0], rows[1]), m)


def serialize_weights(weights: WeightMatrix) -> str:
    return (
        ",".join(_fmt(v) for v in weights.csm_row)
        + "\n"
        + ",".join(_fmt(v) for v in weights.k_row)
        + "\n"
    )
