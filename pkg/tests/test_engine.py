"""Detection engine: initialisation, transformation, stepping, maturation."""

import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddca.data_model import AntigenType, InputEvent, SignalVector, WeightMatrix, default_weights
from ddca.engine import (
    ArithmeticLifespans,
    EngineConfig,
    EngineState,
    GaussianLifespans,
    flush_remaining,
    initialise,
    run_detection,
    step,
    transform_signal,
)
from ddca.errors import ConfigurationError, DimensionalityError, DomainError

W = default_weights()


def antigen(t, aid):
    return InputEvent(t, AntigenType(aid))


def signal(t, *values):
    return InputEvent(t, SignalVector(tuple(float(v) for v in values)))


def reference_run(events, weights, lifespans, flush=False):
    """Brute-force simulator: one plain dict per cell, straight from the rules."""
    cells = [{"init": float(x), "life": float(x), "prof": 0.0, "ant": []} for x in lifespans]
    out = []
    theta = 0
    for ev in events:
        if isinstance(ev.payload, AntigenType):
            theta += 1
            cells[(theta - 1) % len(cells)]["ant"].append(ev.payload.id)
        else:
            csm = 0.0
            k = 0.0
            for w1, w2, v in zip(weights.csm_row, weights.k_row, ev.payload.values):
                csm += w1 * v
                k += w2 * v
            for cell in cells:
                if cell["life"] <= 0.0:
                    out.extend((aid, cell["prof"]) for aid in cell["ant"])
                    cell["ant"] = []
                    cell["life"] = cell["init"] - csm
                    cell["prof"] = k
                else:
                    cell["life"] -= csm
                    cell["prof"] += k
    if flush:
        for cell in cells:
            out.extend((aid, cell["prof"]) for aid in cell["ant"])
            cell["ant"] = []
    return out, cells


class TestInitialise:
    def test_arithmetic_series(self):
        state = initialise(3, ArithmeticLifespans(10.0, 10.0))
        assert [c.initial_lifespan for c in state.population] == [10.0, 20.0, 30.0]
        assert [c.lifespan for c in state.population] == [10.0, 20.0, 30.0]
        assert all(c.signal_profile == 0.0 and c.antigen_profile == () for c in state.population)
        assert state.theta == 0 and state.tick == 0 and state.records == []

    def test_single_cell_zero_step(self):
        state = initialise(1, ArithmeticLifespans(5.0, 0.0))
        assert [c.initial_lifespan for c in state.population] == [5.0]

    def test_gaussian_seeded_sample_mean(self):
        # 100 positive draws from N(20, 2^2); sample mean within 3 sigma of
        # the mean of the sampling distribution, 3 * 2 / sqrt(100) = 0.6.
        state = initialise(100, GaussianLifespans(20.0, 2.0, seed=42))
        spans = [c.initial_lifespan for c in state.population]
        assert all(s > 0 for s in spans)
        assert abs(sum(spans) / 100 - 20.0) <= 0.6

    def test_gaussian_distinct_when_sigma_positive(self):
        state = initialise(50, GaussianLifespans(20.0, 2.0, seed=7))
        spans = [c.initial_lifespan for c in state.population]
        assert len(set(spans)) == 50

    def test_configuration_errors(self):
        with pytest.raises(ConfigurationError):
            ArithmeticLifespans(0.0, 1.0)
        with pytest.raises(ConfigurationError):
            ArithmeticLifespans(5.0, -1.0)
        with pytest.raises(ConfigurationError):
            GaussianLifespans(0.0, 2.0, seed=0)
        with pytest.raises(ConfigurationError):
            initialise(0, ArithmeticLifespans(5.0, 0.0))


class TestTransform:
    def test_zero_vector(self):
        out = transform_signal(W, SignalVector((0.0, 0.0, 0.0)))
        assert (out.csm, out.k) == (0.0, 0.0)

    def test_hand_dot_product(self):
        out = transform_signal(W, SignalVector((0.2, 0.3, 0.5)))
        assert (out.csm, out.k) == (1.0, 0.0)

    def test_safe_signal_suppression(self):
        w = WeightMatrix((2.0, 1.0, 2.0), (2.0, 1.0, -3.0))
        out = transform_signal(w, SignalVector((0.0, 0.0, 1.0)))
        assert (out.csm, out.k) == (2.0, -3.0)

    def test_arity_mismatch(self):
        with pytest.raises(DimensionalityError):
            transform_signal(W, SignalVector((0.1, 0.2)))

    @given(
        st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3),
        st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3),
    )
    def test_linearity(self, a, b):
        s1 = SignalVector(tuple(a))
        s2 = SignalVector(tuple(b))
        s12 = SignalVector(tuple(x + y for x, y in zip(a, b)))
        o1 = transform_signal(W, s1)
        o2 = transform_signal(W, s2)
        o12 = transform_signal(W, s12)
        assert o12.csm == pytest.approx(o1.csm + o2.csm, abs=1e-12)
        assert o12.k == pytest.approx(o1.k + o2.k, abs=1e-12)


class TestStep:
    def test_single_cell_hand_trace(self):
        state = initialise(1, ArithmeticLifespans(5.0, 0.0))
        step(state, antigen(1, 9), W)
        assert state.theta == 1
        assert state.cell(1).antigen_profile == (9,)

        expected = [(3.0, 2.0), (1.0, 4.0), (-1.0, 6.0)]
        for t, (life, prof) in zip((2, 3, 4), expected):
            step(state, signal(t, 1, 1, 0), W)
            cell = state.cell(1)
            assert (cell.lifespan, cell.signal_profile) == (life, prof)
            assert state.records == []  # guard uses the previous tick's lifespan

        step(state, signal(5, 1, 1, 0), W)
        assert [(r.antigen, r.profile) for r in state.records] == [(9, 6.0)]
        cell = state.cell(1)
        assert (cell.lifespan, cell.signal_profile, cell.antigen_profile) == (3.0, 2.0, ())

    def test_sequential_sampling_five_antigens(self):
        state = initialise(3, ArithmeticLifespans(10.0, 10.0))
        for t, aid in enumerate((11, 12, 13, 14, 15), start=1):
            step(state, antigen(t, aid), W)
        profiles = [c.antigen_profile for c in state.population]
        assert profiles == [(11, 14), (12, 15), (13,)]
        assert state.theta == 5
        assert state.records == []

    def test_zero_vector_signal_resets_matured_only(self):
        state = initialise(2, ArithmeticLifespans(1.0, 10.0))
        step(state, signal(1, 1, 1, 1), W)  # csm=3: cell1 -> -2, cell2 -> 8
        step(state, antigen(2, 4), W)
        step(state, signal(3, 0, 0, 0), W)
        c1, c2 = state.population
        assert (c1.lifespan, c1.signal_profile) == (1.0, 0.0)  # matured, reset with o=(0,0)
        assert (c2.lifespan, c2.signal_profile) == (8.0, 1.0)  # untouched by zero vector
        # cell1 presented its sampled antigen with the profile held before reset
        assert [(r.antigen, r.profile) for r in state.records] == [(4, 1.0)]

    def test_time_mismatch_rejected(self):
        state = initialise(1, ArithmeticLifespans(5.0, 0.0))
        with pytest.raises(DomainError):
            step(state, antigen(2, 1), W)


class TestRunDetection:
    def test_empty_stream(self):
        _, records = run_detection([], EngineConfig(weights=W, n_cells=2))
        assert records == []

    def test_trace_end_to_end(self):
        events = [antigen(1, 9)] + [signal(t, 1, 1, 0) for t in range(2, 6)]
        cfg = EngineConfig(weights=W, n_cells=1, lifespans=ArithmeticLifespans(5.0, 0.0))
        _, records = run_detection(events, cfg)
        assert [(r.antigen, r.profile) for r in records] == [(9, 6.0)]

    def test_no_maturation_when_csm_never_depletes(self):
        events = []
        for t in range(1, 41):
            events.append(antigen(t, t) if t % 2 else signal(t, 0.1, 0.1, 0.1))
        cfg = EngineConfig(weights=W, n_cells=4, lifespans=ArithmeticLifespans(1e9, 1.0))
        _, records = run_detection(events, cfg)
        assert records == []

    def test_flush_marks_and_drains(self):
        events = [antigen(1, 5), antigen(2, 6)]
        cfg = EngineConfig(weights=W, n_cells=2, flush_at_end=True)
        state, records = run_detection(events, cfg)
        assert [(r.antigen, r.flushed) for r in records] == [(5, True), (6, True)]
        assert all(c.antigen_profile == () for c in state.population)
        assert flush_remaining(state) == 0  # idempotent once drained

    def test_determinism_bit_for_bit(self):
        rng = random.Random(99)
        events = []
        for t in range(1, 301):
            if rng.random() < 0.4:
                events.append(antigen(t, rng.randint(1, 8)))
            else:
                events.append(signal(t, rng.random(), rng.random(), rng.random()))
        cfg = EngineConfig(
            weights=W, n_cells=7, lifespans=GaussianLifespans(6.0, 1.0, seed=3)
        )
        _, first = run_detection(events, cfg)
        _, second = run_detection(events, cfg)
        assert first == second


def random_events(rng, n, antigen_prob=0.4, n_types=8):
    events = []
    for t in range(1, n + 1):
        if rng.random() < antigen_prob:
            events.append(antigen(t, rng.randint(1, n_types)))
        else:
            events.append(signal(t, rng.random(), rng.random(), rng.random()))
    return events


@pytest.mark.parametrize("seed", range(6))
def test_engine_matches_brute_force_reference(seed):
    rng = random.Random(seed)
    n_cells = rng.randint(1, 9)
    lifespans = [rng.uniform(0.5, 6.0) for _ in range(n_cells)]
    events = random_events(rng, 400)

    state = EngineState(np.asarray(lifespans))
    for ev in events:
        step(state, ev, W)
    engine_out = [(r.antigen, r.profile) for r in state.records]

    ref_out, ref_cells = reference_run(events, W, lifespans)
    assert engine_out == ref_out
    for cell, ref in zip(state.population, ref_cells):
        assert cell.lifespan == pytest.approx(ref["life"], rel=1e-12, abs=1e-12)
        assert cell.signal_profile == pytest.approx(ref["prof"], rel=1e-12, abs=1e-12)
        assert list(cell.antigen_profile) == ref["ant"]


@settings(max_examples=40, deadline=None)
@given(
    n_cells=st.integers(1, 12),
    theta=st.integers(0, 80),
)
def test_sequential_sampling_counts_match_enumeration(n_cells, theta):
    state = initialise(n_cells, ArithmeticLifespans(10.0, 1.0))
    for q in range(1, theta + 1):
        step(state, antigen(q, q), W)
    for i, cell in enumerate(state.population, start=1):
        expected = [q for q in range(1, theta + 1) if ((q - 1) % n_cells) + 1 == i]
        assert list(cell.antigen_profile) == expected


@pytest.mark.parametrize("seed", range(4))
def test_telescoping_accumulators_between_resets(seed):
    # Between resets: initial - lifespan == sum of csm applied since the
    # reset, and signal_profile == sum of k applied since the reset.
    rng = random.Random(1000 + seed)
    n_cells = rng.randint(1, 5)
    cfg_spans = [rng.uniform(1.0, 8.0) for _ in range(n_cells)]
    events = random_events(rng, 300)

    state = EngineState(np.asarray(cfg_spans))

    csm_since = [0.0] * n_cells
    k_since = [0.0] * n_cells
    for ev in events:
        if ev.is_signal:
            out = transform_signal(W, ev.payload)
            pre = [c.lifespan for c in state.population]
            step(state, ev, W)
            for i in range(n_cells):
                if pre[i] <= 0.0:
                    csm_since[i] = out.csm
                    k_since[i] = out.k
                else:
                    csm_since[i] += out.csm
                    k_since[i] += out.k
        else:
            step(state, ev, W)
        for i, cell in enumerate(state.population):
            assert cell.initial_lifespan - cell.lifespan == pytest.approx(csm_since[i], abs=1e-9)
            assert cell.signal_profile == pytest.approx(k_since[i], abs=1e-9)
