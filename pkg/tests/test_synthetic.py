"""Synthetic stream generator: determinism, shape, causal signal regimes."""

import pytest

from ddca.analysis import anomaly_metrics
from ddca.data_model import compute_stats, default_weights, serialize_stream
from ddca.engine import ArithmeticLifespans, EngineConfig, run_detection
from ddca.errors import ConfigurationError
from ddca.synthetic import SynthSpec, generate_events


def test_exact_antigen_count():
    spec = SynthSpec(n=100, antigen_fraction=0.4, seed=1)
    stats = compute_stats(generate_events(spec))
    assert (stats.n, stats.a) == (100, 40)


def test_times_are_consecutive_and_values_clipped():
    spec = SynthSpec(n=250, antigen_fraction=0.3, noise=0.3, seed=5)
    events = generate_events(spec)
    assert [e.time for e in events] == list(range(1, 251))
    for e in events:
        if e.is_signal:
            assert all(0.0 <= v <= 1.0 for v in e.payload.values)


def test_fixed_seed_is_byte_identical():
    spec = SynthSpec(n=300, antigen_fraction=0.4, n_types=3, seed=77)
    first = serialize_stream(generate_events(spec))
    second = serialize_stream(generate_events(spec))
    assert first == second


def test_different_seeds_differ():
    a = serialize_stream(generate_events(SynthSpec(n=200, seed=1)))
    b = serialize_stream(generate_events(SynthSpec(n=200, seed=2)))
    assert a != b


def test_lag_delays_regime_activation():
    # One antigen early, zero noise: with lag L the first signal reflecting
    # the antigen's regime appears exactly L+1 ticks after it.
    for lag in (0, 2):
        spec = SynthSpec(
            n=20,
            antigen_fraction=0.05,
            n_types=1,
            anomalous_types=frozenset({1}),
            noise=0.0,
            lag=lag,
            seed=3,
        )
        events = generate_events(spec)
        antigen_tick = next(e.time for e in events if e.is_antigen)
        anomalous = spec.anomalous_signal
        regime_ticks = [
            e.time for e in events if e.is_signal and e.payload.values == anomalous
        ]
        assert regime_ticks  # the regime does appear
        assert min(regime_ticks) == antigen_tick + 1 + lag


def test_unsatisfiable_spec_rejected():
    with pytest.raises(ConfigurationError):
        SynthSpec(n=50, antigen_fraction=1.0, lag=1)
    with pytest.raises(ConfigurationError):
        SynthSpec(n=50, anomalous_types=frozenset({9}), n_types=2)
    with pytest.raises(ConfigurationError):
        SynthSpec(n=50, lag=-1)


def test_anomalous_type_scores_above_normal_type():
    spec = SynthSpec(
        n=1500,
        antigen_fraction=0.4,
        n_types=2,
        anomalous_types=frozenset({1}),
        type_persistence=0.7,
        seed=42,
    )
    events = generate_events(spec)
    config = EngineConfig(
        weights=default_weights(),
        n_cells=8,
        lifespans=ArithmeticLifespans(3.0, 0.5),
    )
    _, records = run_detection(events, config)
    report = anomaly_metrics(records, epsilon=0.0)
    assert report.metric(1) > report.metric(2)
