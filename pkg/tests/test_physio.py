"""Tests for sample decoding, detectors, heart rate, and stress."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vif.physio import (
    BreathDetector,
    DeepBreathCounter,
    HeartMonitor,
    MalformedSampleError,
    Sample,
    SignalRegistry,
    StressParams,
    decode_sample,
    encode_sample,
    eval_predicate,
    heart_rate,
    stress_index,
)
from vif.script import DetectorSpec

from oracles import breath_cycles_offline


def breath_sample(t, v, src="bits"):
    return Sample(t=t, src=src, sig="breath", v=v)


# --- decode_sample ----------------------------------------------------------


def test_decode_continuous():
    got = decode_sample('{"t":1000,"src":"bits","sig":"breath","v":0.42}')
    assert got == Sample(1000, "bits", "breath", v=0.42)


def test_decode_event():
    got = decode_sample('{"t":2000,"src":"polar","sig":"heart","ev":"beat"}')
    assert got == Sample(2000, "polar", "heart", ev="beat")


def test_decode_ignores_unknown_fields():
    got = decode_sample('{"t":1,"src":"a","sig":"b","v":0.5,"battery":17}')
    assert got.v == 0.5


def test_decode_clamps_value():
    assert decode_sample('{"t":1,"src":"a","sig":"b","v":1.7}').v == 1.0
    assert decode_sample('{"t":1,"src":"a","sig":"b","v":-0.2}').v == 0.0


@pytest.mark.parametrize(
    "line",
    [
        '{"t":1,"sig":"x"}',
        "not json at all",
        '["t",1]',
        '{"t":-5,"src":"a","sig":"b","v":0.5}',
        '{"t":1,"src":"a","sig":"b"}',
        '{"t":1,"src":"a","sig":"b","v":0.5,"ev":"beat"}',
        '{"t":1,"src":"a","sig":"b","v":"high"}',
        '{"t":1,"src":"a","sig":"b","v":true}',
        '{"t":1,"src":"a","sig":"b","ev":""}',
        '{"t":NaN,"src":"a","sig":"b","v":0.5}',
    ],
)
def test_decode_malformed(line):
    with pytest.raises(MalformedSampleError):
        decode_sample(line)


def test_encode_decode_round_trip():
    for s in (Sample(5, "bits", "breath", v=0.62), Sample(9, "polar", "heart", ev="beat")):
        assert decode_sample(encode_sample(s)) == s


# --- breath detector ---------------------------------------------------------


def run_detector(times, values, detector=None):
    det = detector or BreathDetector()
    cycles = []
    for t, v in zip(times, values):
        cycle = det.step(breath_sample(t, v))
        if cycle is not None:
            cycles.append(cycle)
    return det, cycles


def test_constant_signal_never_cycles():
    _, cycles = run_detector(range(0, 10000, 100), [0.5] * 100)
    assert cycles == []


def test_square_wave_single_cycle():
    # oracle hand-trace: rise at 500, fall at 1000, close at 1500
    _, cycles = run_detector([0, 500, 1000, 1500], [0.1, 0.9, 0.1, 0.9])
    assert len(cycles) == 1
    assert cycles[0].t_end == 1500
    assert cycles[0].amplitude == pytest.approx(0.8)


def test_sinusoid_matches_offline_oracle():
    t = np.arange(0, 20001, 100)
    v = 0.5 + 0.45 * np.sin(2 * np.pi * t / 4000.0)
    _, cycles = run_detector(t.tolist(), v.tolist())
    oracle = breath_cycles_offline(t, v)
    assert [(c.t_end, c.amplitude) for c in cycles] == pytest.approx(oracle)
    # frozen from the oracle: 4 completed cycles, each spanning one full
    # peak-to-trough excursion of 0.9
    assert len(cycles) == 4
    for c in cycles:
        assert abs(c.amplitude - 0.9) <= 0.05


def test_out_of_range_values_are_clamped():
    _, cycles = run_detector([0, 1, 2, 3], [0.0, 1.5, -0.5, 1.2])
    assert len(cycles) == 1
    assert cycles[0].amplitude == pytest.approx(1.0)


@given(
    st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=2, max_size=200)
)
def test_detector_agrees_with_oracle_on_random_streams(values):
    t = list(range(0, len(values) * 50, 50))
    _, cycles = run_detector(t, values)
    oracle = breath_cycles_offline(np.array(t), np.array(values))
    assert [(c.t_end, c.amplitude) for c in cycles] == pytest.approx(oracle)


def test_detector_determinism():
    rng = np.random.default_rng(7)
    v = rng.random(500)
    t = np.arange(0, 500 * 100, 100)
    _, first = run_detector(t.tolist(), v.tolist())
    _, second = run_detector(t.tolist(), v.tolist())
    assert first == second


# --- deep-breath counter ------------------------------------------------------


def cycle(t_end, amplitude):
    from vif.physio import BreathCycle

    return BreathCycle(t_end=t_end, amplitude=amplitude, duration_ms=4000, src="bits")


def test_counter_counts_only_deep_cycles():
    counter = DeepBreathCounter(spec=DetectorSpec("breathVar", 3))
    fired = [counter.update(cycle(1000 * i, amp)) for i, amp in enumerate([0.8, 0.3, 0.9, 0.75])]
    assert [f is not None for f in fired] == [False, False, False, True]
    assert fired[3].t == 3000


def test_counter_fires_once_and_needs_rearm():
    counter = DeepBreathCounter(spec=DetectorSpec("breathVar", 1))
    assert counter.update(cycle(100, 0.9)) is not None
    assert counter.update(cycle(200, 0.95)) is None


def test_counter_ignores_shallow():
    counter = DeepBreathCounter(spec=DetectorSpec("breathVar", 1))
    for i in range(10):
        assert counter.update(cycle(100 * i, 0.69)) is None


# --- heart rate ----------------------------------------------------------------


def test_heart_rate_periodic_beats():
    monitor = HeartMonitor()
    for t in (0, 800, 1600, 2400):
        monitor.add_beat(t)
    assert heart_rate(monitor, 2400) == pytest.approx(75.0, rel=1e-9)


def test_heart_rate_needs_two_beats():
    monitor = HeartMonitor()
    monitor.add_beat(0)
    assert heart_rate(monitor, 100) is None


def test_heart_rate_window_expiry():
    monitor = HeartMonitor()
    monitor.add_beat(0)
    monitor.add_beat(1000)
    assert heart_rate(monitor, 20000) is None


def test_heart_rate_drops_non_monotonic():
    monitor = HeartMonitor()
    assert monitor.add_beat(1000)
    assert not monitor.add_beat(1000)
    assert not monitor.add_beat(400)
    assert monitor.dropped_beats == 2
    assert monitor.beat_times == [1000]


@given(st.integers(min_value=300, max_value=2000))
def test_heart_rate_exact_for_periodic(interval):
    monitor = HeartMonitor()
    beats = [i * interval for i in range(8)]
    for b in beats:
        monitor.add_beat(b)
    now = beats[-1]
    expected = 60000.0 / interval
    got = heart_rate(monitor, now)
    assert got is not None
    assert abs(got - expected) / expected < 1e-9


# --- stress --------------------------------------------------------------------


def test_stress_rest_point_is_zero():
    assert stress_index(70, 12, StressParams()) == 0.0


def test_stress_saturates_at_one():
    assert stress_index(100, 24, StressParams()) == 1.0


def test_stress_direct_value():
    assert stress_index(85, 12, StressParams()) == pytest.approx(0.25)


def test_stress_clamped_below():
    assert stress_index(40, 6, StressParams()) == 0.0


@given(
    st.floats(min_value=0, max_value=250, allow_nan=False),
    st.floats(min_value=0, max_value=80, allow_nan=False),
)
def test_stress_bounded_and_monotone(hr, br):
    p = StressParams()
    s = stress_index(hr, br, p)
    assert 0.0 <= s <= 1.0
    assert stress_index(hr + 5, br, p) >= s
    assert stress_index(hr, br + 2, p) >= s


# --- registry + predicates ------------------------------------------------------


class FakeDay:
    def __init__(self, night):
        self.night = night


def test_registry_counter_pipeline():
    registry = SignalRegistry(bindings={"breathVar": "breath"})
    registry.arm_counter(DetectorSpec("breathVar", 2))
    events = []
    t = np.arange(0, 20001, 100)
    v = 0.5 + 0.45 * np.sin(2 * np.pi * t / 4000.0)
    for ti, vi in zip(t.tolist(), v.tolist()):
        events.extend(registry.ingest(breath_sample(ti, vi)))
    assert len(events) == 1
    assert events[0].detector == DetectorSpec("breathVar", 2)
    assert events[0].src == "bits"
    assert events[0].t == 8200  # second oracle cycle close


def test_registry_expect_source_is_preserved():
    registry = SignalRegistry()
    registry.arm_counter(DetectorSpec("breathVar", 1))
    events = []
    for ti, vi in zip([0, 500, 1000, 1500], [0.1, 0.9, 0.1, 0.9]):
        events.extend(registry.ingest(breath_sample(ti, vi, src="belt9")))
    assert [e.src for e in events] == ["belt9"]


def test_registry_malformed_lines_counted_not_applied():
    registry = SignalRegistry()
    registry.ingest_line('{"t":1,"src":"a","sig":"breath","v":0.5}')
    before = registry.semantic_state()
    registry.ingest_line("garbage")
    registry.ingest_line('{"t":2,"sig":"breath"}')
    assert registry.dropped_lines == 2
    assert registry.semantic_state() == before


def test_forced_flags_override_predicates():
    registry = SignalRegistry()
    day = FakeDay(night=False)
    assert not eval_predicate("stressed", registry, day, 0)
    registry.ingest(Sample(0, "sim", "sim.stressed", ev="true"))
    assert eval_predicate("stressed", registry, day, 0)
    assert eval_predicate("sim.stressed", registry, day, 0)
    registry.ingest(Sample(1, "sim", "sim.stressed", ev="false"))
    assert not eval_predicate("stressed", registry, day, 1)


def test_stress_threshold_predicate():
    registry = SignalRegistry()
    registry.stress = 0.9
    assert eval_predicate("stressed", registry, FakeDay(False), 0)
    registry.stress = 0.49
    assert not eval_predicate("stressed", registry, FakeDay(False), 0)


def test_relaxed_needs_hold():
    registry = SignalRegistry()
    registry.update_stress(0)  # s = 0 at rest
    assert registry.stress == 0.0
    assert not eval_predicate("relaxed", registry, FakeDay(False), 4000)
    assert eval_predicate("relaxed", registry, FakeDay(False), 5000)


def test_relaxed_hold_resets_when_stress_rises():
    registry = SignalRegistry()
    registry.update_stress(0)
    # spike: fast heartbeats push s over the relaxed threshold
    for t in (1000, 1400, 1800, 2200, 2600, 3000):
        registry.ingest(Sample(t, "polar", "heart", ev="beat"))
    assert registry.stress > 0.3
    assert not eval_predicate("relaxed", registry, FakeDay(False), 8000)
    registry.update_stress(14000)  # beats leave the window; back at rest
    assert not eval_predicate("relaxed", registry, FakeDay(False), 14000)
    assert eval_predicate("relaxed", registry, FakeDay(False), 19000)


def test_night_day_predicates():
    registry = SignalRegistry()
    assert eval_predicate("night", registry, FakeDay(True), 0)
    assert not eval_predicate("day", registry, FakeDay(True), 0)
    assert eval_predicate("day", registry, FakeDay(False), 0)


def test_unknown_predicate_false_and_warned_once():
    registry = SignalRegistry()
    assert not eval_predicate("haunted", registry, FakeDay(False), 0)
    assert not eval_predicate("haunted", registry, FakeDay(False), 1)
    assert registry.warned_predicates == {"haunted"}


def test_breath_rate_from_cycles():
    registry = SignalRegistry()
    t = np.arange(0, 20001, 100)
    v = 0.5 + 0.45 * np.sin(2 * np.pi * t / 4000.0)
    for ti, vi in zip(t.tolist(), v.tolist()):
        registry.ingest(breath_sample(ti, vi))
    br = registry.breath_rate(20000)
    assert br == pytest.approx(15.0, rel=0.01)  # 4000 ms period
