"""Dendritic-cell detection engine.

The engine keeps a fixed population of N cells. Each cell carries an initial
lifespan (constant across resets), a current lifespan, a cumulative signal
profile, and the sequence of antigens it has sampled since its last reset.

Event handling per tick:

* Antigen event: the antigen is appended to exactly one cell's profile,
  chosen round-robin over cell indices ("sequential sampling"): the q-th
  antigen overall goes to cell ``((q - 1) % N) + 1`` (1-based). Lifespans and
  signal profiles do not change.

* Signal event: the input vector is transformed once into the pair
  (csm, k). Then, for every cell in index order: if the cell's lifespan
  *before* this tick is <= 0, the cell first presents one output record
  (antigen, current signal profile) per sampled antigen, then resets to
  ``lifespan = initial - csm``, ``signal_profile = k`` and an empty antigen
  profile (the reset already absorbs the current tick's signals). Otherwise
  the cell accumulates: ``lifespan -= csm``, ``signal_profile += k``.

Cells that never trip the lifespan guard never present; their sampled
antigens are dropped at end of stream unless a final flush pass is requested,
in which case the presented records are marked as flushed.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .data_model import AntigenType, InputEvent, SignalVector, WeightMatrix
from .errors import ConfigurationError, DimensionalityError, DomainError, IntervalRangeError


@dataclass(frozen=True, slots=True)
class OutputSignals:
    """Transformed signal pair: csm drives *when* a cell decides, k drives *how*."""

    csm: float
    k: float


@dataclass(frozen=True, slots=True)
class ArithmeticLifespans:
    """Initial lifespans x_i = x1 + (i - 1) * step, ascending with cell index."""

    x1: float
    step: float = 0.0

    def __post_init__(self):
        if self.x1 <= 0:
            raise ConfigurationError(f"arithmetic lifespans need x1 > 0, got {self.x1}")
        if self.step < 0:
            raise ConfigurationError(f"arithmetic lifespans need step >= 0, got {self.step}")

    def generate(self, n_cells: int) -> np.ndarray:
        return self.x1 + self.step * np.arange(n_cells, dtype=np.float64)

    def mean(self, n_cells: int) -> float:
        return self.x1 + (n_cells - 1) * self.step / 2.0


@dataclass(frozen=True, slots=True)
class GaussianLifespans:
    """Initial lifespans drawn from N(mu, sigma^2), resampled until positive."""

    mu: float
    sigma: float
    seed: int

    def __post_init__(self):
        if self.mu <= 0:
            raise ConfigurationError(f"gaussian lifespans need mu > 0, got {self.mu}")
        if self.sigma < 0:
            raise ConfigurationError(f"gaussian lifespans need sigma >= 0, got {self.sigma}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be unsigned, got {self.seed}")

    def generate(self, n_cells: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        draws = rng.normal(self.mu, self.sigma, n_cells)
        # Rejection-resample non-positive draws; lifespans must stay > 0.
        while True:
            bad = draws <= 0.0
            if not bad.any():
                return draws
            draws[bad] = rng.normal(self.mu, self.sigma, int(bad.sum()))


LifespanDistribution = Union[ArithmeticLifespans, GaussianLifespans]


@dataclass(frozen=True, slots=True)
class OutputRecord:
    """A presented (antigen type, signal profile) pair in the output list."""

    antigen: int
    profile: float
    flushed: bool = False


@dataclass(frozen=True, slots=True)
class DendriticCell:
    """Immutable snapshot of one cell's state."""

    index: int
    initial_lifespan: float
    lifespan: float
    signal_profile: float
    antigen_profile: tuple[int, ...]


class RunTrace:
    """Per-tick record of a run, for interval measurements.

    An interval [t_b, t_e] covers the ``t_e - t_b`` ticks t_b+1 .. t_e, the
    same count of ticks as the estimator formulas divide by. Tick t is stored
    at index t - 1.
    """

    __slots__ = ("kinds", "csm", "k", "maturations", "records")

    def __init__(self):
        self.kinds = array("b")        # 0 = signal, 1 = antigen
        self.csm = array("d")          # transformed csm (0.0 on antigen ticks)
        self.k = array("d")
        self.maturations = array("I")  # lifespan-guard firings this tick
        self.records = array("I")      # output records emitted this tick

    def append_tick(self, kind: int, csm: float, k: float, maturations: int, records: int) -> None:
        self.kinds.append(kind)
        self.csm.append(csm)
        self.k.append(k)
        self.maturations.append(maturations)
        self.records.append(records)

    @property
    def n_ticks(self) -> int:
        return len(self.kinds)

    def _check_range(self, t_b: int, t_e: int) -> None:
        if not (1 <= t_b < t_e):
            raise IntervalRangeError(f"need 1 <= t_b < t_e, got [{t_b}, {t_e}]")
        if t_e > self.n_ticks:
            raise IntervalRangeError(
                f"interval end {t_e} beyond recorded run of {self.n_ticks} ticks"
            )

    def csm_slice(self, t_b: int, t_e: int) -> list[float]:
        self._check_range(t_b, t_e)
        return list(self.csm[t_b:t_e])

    def matured_in(self, t_b: int, t_e: int) -> int:
        self._check_range(t_b, t_e)
        return sum(self.maturations[t_b:t_e])

    def records_in(self, t_b: int, t_e: int) -> int:
        self._check_range(t_b, t_e)
        return sum(self.records[t_b:t_e])

    def antigens_up_to(self, tick: int) -> int:
        if not (0 <= tick <= self.n_ticks):
            raise IntervalRangeError(f"tick {tick} beyond recorded run of {self.n_ticks} ticks")
        return sum(self.kinds[:tick])


class EngineState:
    """Mutable population state folded over the input stream."""

    __slots__ = (
        "n_cells",
        "theta",
        "tick",
        "records",
        "trace",
        "_initial",
        "_lifespan",
        "_profile",
        "_antigens",
        "maturation_events",
    )

    def __init__(self, initial_lifespans: np.ndarray, trace: bool = False):
        self.n_cells = int(initial_lifespans.shape[0])
        self._initial = initial_lifespans.astype(np.float64, copy=True)
        self._lifespan = self._initial.copy()
        self._profile = np.zeros(self.n_cells, dtype=np.float64)
        self._antigens: list[list[int]] = [[] for _ in range(self.n_cells)]
        self.theta = 0
        self.tick = 0
        self.records: list[OutputRecord] = []
        self.maturation_events = 0
        self.trace: Optional[RunTrace] = RunTrace() if trace else None

    @property
    def output_list(self) -> list[OutputRecord]:
        return self.records

    @property
    def population(self) -> tuple[DendriticCell, ...]:
        return tuple(
            DendriticCell(
                index=i + 1,
                initial_lifespan=float(self._initial[i]),
                lifespan=float(self._lifespan[i]),
                signal_profile=float(self._profile[i]),
                antigen_profile=tuple(self._antigens[i]),
            )
            for i in range(self.n_cells)
        )

    def cell(self, index: int) -> DendriticCell:
        return self.population[index - 1]


def initialise(
    n_cells: int,
    lifespans: LifespanDistribution,
    *,
    trace: bool = False,
) -> EngineState:
    """Create a population with distinct positive lifespans, zero profiles."""
    if n_cells < 1:
        raise ConfigurationError(f"population size must be >= 1, got {n_cells}")
    return EngineState(lifespans.generate(n_cells), trace=trace)


def transform_signal(weights: WeightMatrix, signal: SignalVector) -> OutputSignals:
    """Apply the 2 x m weight matrix to an m-vector, yielding (csm, k)."""
    values = signal.values
    if len(values) != weights.dim:
        raise DimensionalityError(
            f"signal has {len(values)} components, weights expect {weights.dim}"
        )
    csm = 0.0
    k = 0.0
    for w1, w2, v in zip(weights.csm_row, weights.k_row, values):
        csm += w1 * v
        k += w2 * v
    return OutputSignals(csm, k)


def step(state: EngineState, event: InputEvent, weights: WeightMatrix) -> EngineState:
    """Advance the engine by one input event (event.time must be tick + 1)."""
    if event.time != state.tick + 1:
        raise DomainError(
            f"event time {event.time} does not follow engine tick {state.tick}"
        )
    state.tick = event.time

    payload = event.payload
    if isinstance(payload, AntigenType):
        state.theta += 1
        idx = (state.theta - 1) % state.n_cells
        state._antigens[idx].append(payload.id)
        if state.trace is not None:
            state.trace.append_tick(1, 0.0, 0.0, 0, 0)
        return state

    out = transform_signal(weights, payload)
    csm, k = out.csm, out.k
    lifespan = state._lifespan
    profile = state._profile

    # The guard uses the lifespan entering this tick, and presented profiles
    # are the values entering this tick, so both are captured before updating.
    mature_mask = lifespan <= 0.0
    any_matured = bool(mature_mask.any())
    n_matured = 0
    emitted = 0
    if any_matured:
        matured_idx = np.nonzero(mature_mask)[0]
        presented = profile[matured_idx].copy()
        n_matured = len(matured_idx)

    lifespan -= csm
    profile += k

    if any_matured:
        append = state.records.append
        for pos, i in enumerate(matured_idx):
            r_i = float(presented[pos])
            for antigen in state._antigens[i]:
                append(OutputRecord(antigen, r_i))
                emitted += 1
            state._antigens[i].clear()
            lifespan[i] = state._initial[i] - csm
            profile[i] = k
        state.maturation_events += n_matured

    if state.trace is not None:
        state.trace.append_tick(0, csm, k, n_matured, emitted)
    return state


def flush_remaining(state: EngineState) -> int:
    """Force one final presentation pass; records are marked as flushed.

    Cells are visited in index order. Lifespans and signal profiles are left
    untouched; antigen profiles are emptied. Returns the number of records
    emitted.
    """
    emitted = 0
    for i in range(state.n_cells):
        r_i = float(state._profile[i])
        for antigen in state._antigens[i]:
            state.records.append(OutputRecord(antigen, r_i, flushed=True))
            emitted += 1
        state._antigens[i].clear()
    return emitted


@dataclass(frozen=True, slots=True)
class EngineConfig:
    """Everything run_detection needs besides the events themselves."""

    weights: WeightMatrix
    n_cells: int = 100
    lifespans: LifespanDistribution = field(default_factory=lambda: ArithmeticLifespans(10.0, 1.0))
    flush_at_end: bool = False
    trace: bool = False


def run_detection(
    events: Iterable[InputEvent],
    config: EngineConfig,
) -> tuple[EngineState, list[OutputRecord]]:
    """Initialise, fold step over all events, return state and output list."""
    state = initialise(config.n_cells, config.lifespans, trace=config.trace)
    for event in events:
        step(state, event, config.weights)
    if config.flush_at_end:
        flush_remaining(state)
    return state, state.records
