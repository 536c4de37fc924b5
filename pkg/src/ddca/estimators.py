"""Closed-form runtime-variable estimators and their measured counterparts.

Two run-time quantities are estimated from the input data alone and can be
compared against exact counters from a traced run:

* matured-cell count: how many lifespan-guard firings occur in an interval,
  estimated from the interval's csm series and the lifespan distribution;
* processed-antigen count: how many output records the matured cells
  present, derived from round-robin sampling arithmetic (balls into bins).

An interval [t_b, t_e] covers the ``t_e - t_b`` ticks t_b+1 .. t_e. The
estimator formulas divide by exactly that tick count, and the measurement
helpers count over exactly those ticks, so the two sides are comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .engine import EngineState, RunTrace
from .errors import ConfigurationError, DomainError


@dataclass(frozen=True, slots=True)
class TimeInterval:
    """Measurement window; covers ticks t_b+1 .. t_e."""

    t_b: int
    t_e: int

    def __post_init__(self):
        if self.t_b < 1:
            raise DomainError(f"interval start must be >= 1, got {self.t_b}")
        if self.t_e <= self.t_b:
            raise DomainError(f"interval end {self.t_e} must exceed start {self.t_b}")

    @property
    def length(self) -> int:
        return self.t_e - self.t_b


@dataclass(frozen=True, slots=True)
class MaturedPoint:
    """Point estimate of the matured-cell count."""

    delta: int


@dataclass(frozen=True, slots=True)
class MaturedBand:
    """Interval estimate of the matured-cell count at fixed confidence."""

    lower: int
    upper: int
    confidence: float = 0.95


@dataclass(frozen=True, slots=True)
class ProcessedAntigenEstimate:
    """Closed-form processed-antigen count with its case bookkeeping.

    ``c`` and ``d_mod`` are the plain residues delta mod N and theta mod N
    (both in 0..N-1). The count itself treats a delta that is a positive
    multiple of N as a full sweep of the population (residue N), which is
    what the sequential bin-counting construction requires; the plain
    residue would make a fully-matured population present nothing.
    """

    nu: int
    case_used: str
    c: int
    d_mod: int


def estimate_matured_uniform(
    n_cells: int,
    x1: float,
    step: float,
    csm_values: Sequence[float],
) -> MaturedPoint:
    """Matured-count point estimate for arithmetic-series lifespans.

    ``csm_values`` holds the interval's per-tick csm outputs (t_e - t_b
    entries). The estimate is floor(N * phi / mu1) with phi the interval
    mean csm and mu1 = x1 + (N - 1) * step / 2 the population mean lifespan.
    """
    if n_cells < 1:
        raise DomainError(f"population size must be >= 1, got {n_cells}")
    if len(csm_values) < 1:
        raise DomainError("csm_values must cover at least one tick")
    mu1 = x1 + (n_cells - 1) * step / 2.0
    if mu1 <= 0:
        raise DomainError(f"population mean lifespan must be > 0, got {mu1}")
    total = math.fsum(csm_values)
    delta = math.floor(n_cells * total / (len(csm_values) * mu1))
    return MaturedPoint(delta=max(0, delta))


def estimate_matured_gaussian(
    n_cells: int,
    mu: float,
    sigma: float,
    csm_values: Sequence[float],
    interval: Union[TimeInterval, None] = None,
) -> MaturedBand:
    """Matured-count 0.95 band for Gaussian lifespans N(mu, sigma^2).

    The sample mean of N drawn lifespans lies in mu +/- 2*sigma/sqrt(N) with
    probability 0.95, which brackets floor(N * phi / sample_mean). Note the
    larger denominator yields the smaller count, so the bound built from
    mu + 2*sigma/sqrt(N) is returned as ``lower``.
    """
    if n_cells < 1:
        raise DomainError(f"population size must be >= 1, got {n_cells}")
    if len(csm_values) < 1:
        raise DomainError("csm_values must cover at least one tick")
    if interval is not None and interval.length != len(csm_values):
        raise DomainError(
            f"csm_values has {len(csm_values)} entries but interval covers {interval.length} ticks"
        )
    spread = 2.0 * sigma / math.sqrt(n_cells)
    if mu <= spread:
        raise DomainError(
            f"need mu > 2*sigma/sqrt(N) for a positive band denominator, got mu={mu}, spread={spread}"
        )
    total = math.fsum(csm_values)
    ticks = len(csm_values)
    lower = math.floor(n_cells * total / ((mu + spread) * ticks))
    upper = math.floor(n_cells * total / ((mu - spread) * ticks))
    return MaturedBand(lower=max(0, lower), upper=max(0, upper))


def estimate_processed_antigens(
    n_cells: int,
    delta: int,
    theta: int,
) -> ProcessedAntigenEstimate:
    """Processed-antigen count after theta round-robin samples and delta resets.

    theta antigens are dealt round-robin into N cells starting at cell 1;
    the first delta cells (in index order) present their contents. With
    d = theta mod N, cells 1..d hold floor(theta/N)+1 antigens and the rest
    hold floor(theta/N), giving the two closed-form cases below.
    """
    if n_cells < 1:
        raise DomainError(f"population size must be >= 1, got {n_cells}")
    if delta < 0 or theta < 0:
        raise DomainError(f"delta and theta must be >= 0, got {delta}, {theta}")
    c = delta - n_cells * (delta // n_cells)
    d_mod = theta - n_cells * (theta // n_cells)
    # A positive delta that is an exact multiple of N means whole sweeps of
    # the population, not zero cells; use residue N for the count arithmetic.
    c_eff = n_cells if (delta > 0 and c == 0) else c
    if c_eff < d_mod:
        nu = c_eff * (1 + theta // n_cells)
        case = "c<d"
    else:
        nu = (c_eff - n_cells) * (theta // n_cells) + theta
        case = "c>=d"
    return ProcessedAntigenEstimate(nu=max(0, nu), case_used=case, c=c, d_mod=d_mod)


def sequential_fill(theta: int, n_cells: int) -> list[int]:
    """Deal theta items round-robin into n_cells bins starting at bin 1."""
    bins = [0] * n_cells
    for q in range(theta):
        bins[q % n_cells] += 1
    return bins


def processed_antigens_oracle(n_cells: int, delta: int, theta: int) -> int:
    """Count items in the first delta bins after a round-robin fill.

    For delta >= n_cells every bin has presented at least once, so all theta
    items count.
    """
    bins = sequential_fill(theta, n_cells)
    return sum(bins[: min(delta, n_cells)]) if delta < n_cells else theta


def _trace_of(run: Union[EngineState, RunTrace]) -> RunTrace:
    if isinstance(run, RunTrace):
        return run
    if run.trace is None:
        raise ConfigurationError("run was not traced; initialise the engine with trace=True")
    return run.trace


def measure_matured(run: Union[EngineState, RunTrace], interval: TimeInterval) -> int:
    """Exact count of lifespan-guard firings over the interval's ticks."""
    return _trace_of(run).matured_in(interval.t_b, interval.t_e)


def measure_processed_antigens(run: Union[EngineState, RunTrace], interval: TimeInterval) -> int:
    """Exact count of output records presented over the interval's ticks.

    Records forced out by an end-of-run flush are not tied to a tick and are
    never counted here.
    """
    return _trace_of(run).records_in(interval.t_b, interval.t_e)
