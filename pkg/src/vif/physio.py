"""Physiological sensor ingestion, detectors, and derived state.

Samples arrive as newline-delimited JSON records. Continuous signals are
normalized to [0, 1] at the sensor; the breath detector segments them
into cycles with a Schmitt trigger, counters turn deep cycles into
discrete detector events, and a sliding-window estimator tracks heart
rate. A linear HR+BR blend stands in for stress.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from vif.script import DetectorSpec


class MalformedSampleError(ValueError):
    """Wire line is not a valid sample record."""


@dataclass(frozen=True)
class Sample:
    t: int  # sender timestamp, ms
    src: str  # source/device name, e.g. "bits"
    sig: str  # signal name, e.g. "breath"
    v: float | None = None  # continuous value in [0, 1]
    ev: str | None = None  # discrete event, e.g. "beat"


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def decode_sample(line: str) -> Sample:
    """Decode one wire record; raises MalformedSampleError, never crashes."""
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, RecursionError) as err:
        raise MalformedSampleError(f"bad JSON: {err}") from None
    if not isinstance(obj, dict):
        raise MalformedSampleError("record is not an object")
    t = obj.get("t")
    src = obj.get("src")
    sig = obj.get("sig")
    if isinstance(t, bool) or not isinstance(t, (int, float)) or t < 0 or not math.isfinite(t):
        raise MalformedSampleError(f"bad timestamp: {t!r}")
    if not isinstance(src, str) or not isinstance(sig, str) or not src or not sig:
        raise MalformedSampleError("missing src/sig")
    has_v = "v" in obj
    has_ev = "ev" in obj
    if has_v == has_ev:
        raise MalformedSampleError("exactly one of v/ev required")
    if has_v:
        v = obj["v"]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise MalformedSampleError(f"bad value: {v!r}")
        return Sample(t=int(t), src=src, sig=sig, v=_clamp01(float(v)))
    ev = obj["ev"]
    if not isinstance(ev, str) or not ev:
        raise MalformedSampleError(f"bad event: {ev!r}")
    return Sample(t=int(t), src=src, sig=sig, ev=ev)


def encode_sample(sample: Sample) -> str:
    """Inverse of decode_sample; key order is part of the wire format."""
    record: dict = {"t": sample.t, "src": sample.src, "sig": sample.sig}
    if sample.v is not None:
        record["v"] = sample.v
    else:
        record["ev"] = sample.ev
    return json.dumps(record, separators=(",", ":"), ensure_ascii=False)


# --- breath cycles ----------------------------------------------------------


@dataclass(frozen=True)
class BreathCycle:
    t_end: int
    amplitude: float
    duration_ms: int
    src: str


@dataclass
class BreathDetector:
    """Schmitt-trigger cycle segmentation of a normalized breath signal.

    idle -> rising on v > theta_hi; rising -> falling on v < theta_lo;
    falling -> rising closes the cycle. cycle_min/cycle_max track the
    extrema since the cycle opened (the opening sample included).
    """

    theta_hi: float = 0.6
    theta_lo: float = 0.4
    theta_deep: float = 0.7  # minimum peak-to-trough amplitude of a deep cycle
    phase: str = "idle"  # "idle" | "rising" | "falling"
    cycle_min: float = 0.0
    cycle_max: float = 0.0
    cycle_start_t: int = 0
    completed_cycles: list[BreathCycle] = field(default_factory=list)

    def __post_init__(self):
        if not (0.0 <= self.theta_lo < self.theta_hi <= 1.0):
            raise ValueError("need 0 <= theta_lo < theta_hi <= 1")

    def step(self, sample: Sample) -> BreathCycle | None:
        v = _clamp01(sample.v if sample.v is not None else 0.0)
        if self.phase == "idle":
            if v > self.theta_hi:
                self.phase = "rising"
                self.cycle_min = self.cycle_max = v
                self.cycle_start_t = sample.t
            return None
        self.cycle_min = min(self.cycle_min, v)
        self.cycle_max = max(self.cycle_max, v)
        if self.phase == "rising":
            if v < self.theta_lo:
                self.phase = "falling"
            return None
        if v > self.theta_hi:  # falling -> rising: cycle complete
            cycle = BreathCycle(
                t_end=sample.t,
                amplitude=self.cycle_max - self.cycle_min,
                duration_ms=sample.t - self.cycle_start_t,
                src=sample.src,
            )
            self.completed_cycles.append(cycle)
            self.phase = "rising"
            self.cycle_min = self.cycle_max = v
            self.cycle_start_t = sample.t
            return cycle
        return None


@dataclass(frozen=True)
class DetectorEvent:
    detector: DetectorSpec
    t: int
    src: str


@dataclass
class DeepBreathCounter:
    """Counts deep cycles and fires exactly once at the target count."""

    spec: DetectorSpec
    theta_deep: float = 0.7
    count: int = 0
    fired: bool = False

    def update(self, cycle: BreathCycle) -> DetectorEvent | None:
        if self.fired:
            return None
        if cycle.amplitude >= self.theta_deep:
            self.count += 1
            if self.count >= self.spec.count:
                self.fired = True
                return DetectorEvent(detector=self.spec, t=cycle.t_end, src=cycle.src)
        return None


# --- heart rate -------------------------------------------------------------


@dataclass
class HeartMonitor:
    """Sliding-window BPM from beat events; non-monotonic beats are dropped."""

    window_ms: int = 10_000
    beat_times: list[int] = field(default_factory=list)
    dropped_beats: int = 0

    def add_beat(self, t: int) -> bool:
        if self.beat_times and t <= self.beat_times[-1]:
            self.dropped_beats += 1
            return False
        self.beat_times.append(t)
        # prune anything the window can never see again
        cutoff = t - self.window_ms
        while self.beat_times and self.beat_times[0] < cutoff:
            self.beat_times.pop(0)
        return True

    def bpm(self, now: int) -> float | None:
        lo = now - self.window_ms
        window = [b for b in self.beat_times if lo <= b <= now]
        if len(window) < 2:
            return None
        mean_ibi = (window[-1] - window[0]) / (len(window) - 1)
        return 60_000.0 / mean_ibi


def heart_rate(state: HeartMonitor, now: int) -> float | None:
    return state.bpm(now)


# --- stress -----------------------------------------------------------------


@dataclass
class StressParams:
    hr_rest: float = 70.0
    hr_range: float = 30.0
    br_rest: float = 12.0
    br_range: float = 12.0
    w_hr: float = 0.5
    w_br: float = 0.5
    threshold_stressed: float = 0.5
    threshold_relaxed: float = 0.3
    relaxed_hold_ms: int = 5_000

    def __post_init__(self):
        if self.hr_range <= 0 or self.br_range <= 0:
            raise ValueError("ranges must be positive")
        if abs(self.w_hr + self.w_br - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if not self.threshold_relaxed < self.threshold_stressed:
            raise ValueError("need threshold_relaxed < threshold_stressed")


def stress_index(hr: float, br: float, p: StressParams) -> float:
    """Linear HR+BR blend, clamped to [0, 1]."""
    s = p.w_hr * (hr - p.hr_rest) / p.hr_range + p.w_br * (br - p.br_rest) / p.br_range
    return _clamp01(s)


# --- registry ---------------------------------------------------------------

BREATH_RATE_WINDOW_MS = 30_000

#: Variables with no explicit story binding fall back to these signals.
DEFAULT_BINDINGS = {"breathVar": "breath"}


class SignalRegistry:
    """Per-signal state for one session: detectors, counters, stress.

    All mutation happens through ingest()/ingest_line()/update_stress(),
    which the runtime calls from its single logical thread.
    """

    def __init__(
        self,
        params: StressParams | None = None,
        bindings: dict[str, str] | None = None,
    ):
        self.params = params or StressParams()
        self.bindings = dict(DEFAULT_BINDINGS)
        if bindings:
            self.bindings.update(bindings)
        self.latest: dict[tuple[str, str], float] = {}
        self.detectors: dict[str, BreathDetector] = {"breath": BreathDetector()}
        self.counters: dict[DetectorSpec, DeepBreathCounter] = {}
        self.heart = HeartMonitor()
        self.forced_flags: dict[str, bool] = {}
        self.stress: float = 0.0
        self.relaxed_since: int | None = None
        self.dropped_lines: int = 0
        self.warned_predicates: set[str] = set()
        self.last_t: int = 0

    def _signal_for(self, var: str) -> str:
        return self.bindings.get(var, var)

    def arm_counter(self, spec: DetectorSpec) -> None:
        """(Re)subscribe a fresh counter; ensures its detector exists."""
        self.counters[spec] = DeepBreathCounter(spec=spec)
        var_signal = self._signal_for(spec.signal)
        self.detectors.setdefault(var_signal, BreathDetector())

    def disarm_counters(self) -> None:
        self.counters.clear()

    def ingest_line(self, line: str) -> list[DetectorEvent]:
        """Decode and ingest one wire line; malformed lines never mutate state."""
        try:
            sample = decode_sample(line)
        except MalformedSampleError:
            self.dropped_lines += 1
            return []
        return self.ingest(sample)

    def ingest(self, sample: Sample) -> list[DetectorEvent]:
        self.last_t = max(self.last_t, sample.t)
        events: list[DetectorEvent] = []
        if sample.sig.startswith("sim."):
            flag = sample.ev == "true" if sample.ev is not None else bool(sample.v)
            self.forced_flags[sample.sig] = flag
            return events
        if sample.v is not None:
            self.latest[(sample.src, sample.sig)] = sample.v
            for detector_signal, detector in self.detectors.items():
                if detector_signal != sample.sig:
                    continue
                cycle = detector.step(sample)
                if cycle is None:
                    continue
                for spec, counter in self.counters.items():
                    if self._signal_for(spec.signal) == sample.sig:
                        fired = counter.update(cycle)
                        if fired is not None:
                            events.append(fired)
        elif sample.ev == "beat" and sample.sig == "heart":
            self.heart.add_beat(sample.t)
        self.update_stress(sample.t)
        return events

    # derived values

    def breath_rate(self, now: int) -> float | None:
        """Breaths/min from cycle durations in the last 30 s; any amplitude."""
        cycles = [
            c
            for c in self.detectors["breath"].completed_cycles
            if now - BREATH_RATE_WINDOW_MS <= c.t_end <= now and c.duration_ms > 0
        ]
        if not cycles:
            return None
        mean_duration = sum(c.duration_ms for c in cycles) / len(cycles)
        return 60_000.0 / mean_duration

    def update_stress(self, now: int) -> float:
        self.last_t = max(self.last_t, now)
        hr = self.heart.bpm(now)
        br = self.breath_rate(now)
        self.stress = stress_index(
            hr if hr is not None else self.params.hr_rest,
            br if br is not None else self.params.br_rest,
            self.params,
        )
        if self.stress > self.params.threshold_relaxed:
            self.relaxed_since = None
        elif self.relaxed_since is None:
            self.relaxed_since = now
        return self.stress

    def semantic_state(self) -> tuple:
        """Observable state for ingest-robustness comparisons (drop counters excluded)."""
        return (
            dict(self.latest),
            list(self.heart.beat_times),
            {sig: list(det.completed_cycles) for sig, det in self.detectors.items()},
            {spec: (c.count, c.fired) for spec, c in self.counters.items()},
            dict(self.forced_flags),
            self.stress,
        )


PREDICATE_NAMES = ("stressed", "relaxed", "night", "day")


def eval_predicate(name: str, registry: SignalRegistry, day, now: int) -> bool:
    """Evaluate a named boolean over session state.

    ``day`` is the current GameTime (used by night/day). Simulator-forced
    flags (``sim.<name>``) override the physiological computation so demo
    scenarios can fake any state.
    """
    forced = registry.forced_flags.get(f"sim.{name}")
    if forced is not None:
        return forced
    if name.startswith("sim."):
        return registry.forced_flags.get(name, False)
    if name == "stressed":
        return registry.stress >= registry.params.threshold_stressed
    if name == "relaxed":
        return (
            registry.relaxed_since is not None
            and now - registry.relaxed_since >= registry.params.relaxed_hold_ms
        )
    if name == "night":
        return day.night
    if name == "day":
        return not day.night
    if name not in registry.warned_predicates:
        registry.warned_predicates.add(name)
    return False
