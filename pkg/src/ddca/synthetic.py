"""Seeded synthetic stream generator for desk-scale experiments and tests.

Streams interleave antigen rows with signal rows so that the signals giving
context for an antigen appear after it (optionally delayed by a fixed lag).
Antigen types from the anomalous subset activate a signal regime whose
components load the evidence-weighted slots; the remaining types activate a
regime loading the suppressing slot. The lag should stay below the mean
maturation window of the detection run consuming the stream, otherwise the
causal context outlives the cell that sampled the antigen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .data_model import AntigenType, InputEvent, SignalVector
from .errors import ConfigurationError


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic stream."""

    n: int
    antigen_fraction: float = 0.4
    n_types: int = 2
    anomalous_types: frozenset[int] = field(default_factory=lambda: frozenset({1}))
    anomalous_signal: tuple[float, ...] = (0.85, 0.65, 0.05)
    normal_signal: tuple[float, ...] = (0.05, 0.10, 0.85)
    noise: float = 0.05
    lag: int = 0
    type_persistence: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ConfigurationError(f"stream size must be >= 0, got {self.n}")
        if not 0.0 <= self.antigen_fraction <= 1.0:
            raise ConfigurationError(
                f"antigen fraction must be in [0, 1], got {self.antigen_fraction}"
            )
        if self.n_types < 1:
            raise ConfigurationError(f"need at least one antigen type, got {self.n_types}")
        if not self.anomalous_types <= set(range(1, self.n_types + 1)):
            raise ConfigurationError(
                f"anomalous types {sorted(self.anomalous_types)} outside 1..{self.n_types}"
            )
        if len(self.anomalous_signal) != len(self.normal_signal):
            raise ConfigurationError("regime vectors must share one dimensionality")
        if self.lag < 0:
            raise ConfigurationError(f"lag must be >= 0, got {self.lag}")
        if self.noise < 0:
            raise ConfigurationError(f"noise must be >= 0, got {self.noise}")
        if not 0.0 <= self.type_persistence < 1.0:
            raise ConfigurationError(
                f"type persistence must be in [0, 1), got {self.type_persistence}"
            )
        a = round(self.n * self.antigen_fraction)
        if self.lag > 0 and a > 0 and a == self.n:
            raise ConfigurationError(
                "lag > 0 is unsatisfiable with antigen fraction 1.0: no signal rows exist"
            )

    @property
    def antigen_count(self) -> int:
        return round(self.n * self.antigen_fraction)

    @property
    def dim(self) -> int:
        return len(self.anomalous_signal)


def generate_events(spec: SynthSpec) -> list[InputEvent]:
    """Deterministically build the event list for a spec."""
    rng = np.random.default_rng(spec.seed)
    a = spec.antigen_count
    n = spec.n
    m = spec.dim
    anomalous = np.asarray(spec.anomalous_signal, dtype=float)
    normal = np.asarray(spec.normal_signal, dtype=float)
    ambient = (anomalous + normal) / 2.0

    events: list[InputEvent] = []
    pending: dict[int, np.ndarray] = {}
    current = ambient
    emitted_antigens = 0
    prev_type: int | None = None

    for t in range(1, n + 1):
        if t in pending:
            current = pending.pop(t)
        # Ceiling placement puts each antigen ahead of its signal run, so the
        # causal context always follows the antigen it belongs to.
        due = -((-t * a) // n) if n else 0
        if emitted_antigens < due:
            emitted_antigens += 1
            if prev_type is not None and rng.random() < spec.type_persistence:
                antigen_type = prev_type
            else:
                antigen_type = int(rng.integers(1, spec.n_types + 1))
            prev_type = antigen_type
            regime = anomalous if antigen_type in spec.anomalous_types else normal
            pending[t + 1 + spec.lag] = regime
            events.append(InputEvent(t, AntigenType(antigen_type)))
        else:
            values = current + rng.uniform(-spec.noise, spec.noise, m)
            np.clip(values, 0.0, 1.0, out=values)
            events.append(InputEvent(t, SignalVector(tuple(float(v) for v in values))))
    return events


def iter_events(spec: SynthSpec) -> Iterator[InputEvent]:
    return iter(generate_events(spec))
