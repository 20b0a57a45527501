"""The story state machine.

A session owns one current section, the triggers armed by that section's
directives, the player's gaze, block placements, the signal registry,
and the virtual day clock. It consumes one ordered input stream (ticks,
player inputs, sensor samples) and appends to a single event transcript;
identical inputs yield byte-identical transcripts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from vif import events as ev
from vif.physio import DetectorEvent, SignalRegistry, StressParams, eval_predicate
from vif.script import (
    ConditionalGoto,
    Expect,
    Paragraph,
    SectionChoice,
    Story,
    TimerGoto,
    errors,
    lint_story,
)
from vif.spatial import (
    BlockPlacement,
    GazeState,
    resolve_block_yaw,
    update_dwell,
    update_view,
    wrap_degrees,
)


class StoryInvalidError(ValueError):
    """Story has lint errors and cannot start a session."""


class ClockRegressionError(ValueError):
    """A tick moved backwards; the state machine requires a monotone clock."""


class UnknownSectionError(KeyError):
    """Transition target does not exist (unreachable for lint-clean stories)."""


@dataclass
class SessionConfig:
    game_day_real_seconds: float = 600.0
    start_fraction: float = 0.25  # sessions start at sunrise
    half_fov: float = 45.0
    dwell_threshold_ms: int = 1000
    stress: StressParams = field(default_factory=StressParams)
    seed: int = 0
    epoch: int = 0  # session t=0, ms
    bio_decimation_ms: int = 100

    def __post_init__(self):
        if self.game_day_real_seconds <= 0:
            raise ValueError("game_day_real_seconds must be positive")


@dataclass(frozen=True)
class GameTime:
    fraction: float  # [0, 1) of the game day; 0 = midnight, 0.5 = noon

    @property
    def sun_azimuth(self) -> float:
        return 360.0 * self.fraction

    @property
    def sun_elevation(self) -> float:
        # rounded so the exact sunrise/sunset boundary lands on 0.0, keeping
        # the strict `< 0` night test false there despite float cos error
        return round(-90.0 * math.cos(2.0 * math.pi * self.fraction), 9)

    @property
    def night(self) -> bool:
        return self.sun_elevation < 0.0


def day_phase(config: SessionConfig, now: int) -> GameTime:
    """Virtual day clock: maps session time to a sun position."""
    if now < config.epoch:
        raise ClockRegressionError(f"now={now} precedes epoch={config.epoch}")
    elapsed_s = (now - config.epoch) / 1000.0
    fraction = (elapsed_s / config.game_day_real_seconds + config.start_fraction) % 1.0
    return GameTime(fraction=fraction)


# --- armed triggers ---------------------------------------------------------


@dataclass
class TimerTrigger:
    fire_at: int
    target: str
    owner: str
    seq: int


@dataclass
class ConditionalTrigger:
    fire_at: int
    predicate: str
    target: str
    owner: str
    seq: int


@dataclass
class ChoiceTrigger:
    span_id: str
    target: str
    owner: str


@dataclass
class SectionChoiceTrigger:
    target: str
    owner: str


@dataclass
class ExpectTrigger:
    detector: object  # DetectorSpec
    source: str
    target: str
    owner: str


class Session:
    """One running story. All mutation happens on a single logical thread."""

    def __init__(self, story: Story, config: SessionConfig | None = None):
        diagnostics = lint_story(story)
        if errors(diagnostics):
            raise StoryInvalidError(
                "; ".join(f"{d.code}@{d.line}: {d.message}" for d in errors(diagnostics))
            )
        self.story = story
        self.config = config or SessionConfig()
        self.registry = SignalRegistry(
            params=self.config.stress, bindings=story.detector_bindings()
        )
        self.gaze = GazeState(dwell_threshold_ms=self.config.dwell_threshold_ms)
        self.placements: list[BlockPlacement] = []
        self.current_section: str | None = None
        self.timers: list[TimerTrigger] = []
        self.conditionals: list[ConditionalTrigger] = []
        self.choices: list[ChoiceTrigger] = []
        self.section_choice: SectionChoiceTrigger | None = None
        self.expects: list[ExpectTrigger] = []
        self.deferred: list[TimerGoto | ConditionalGoto] = []  # FOV-gated arming
        self.transcript: list[dict] = []
        self.last_now: int = self.config.epoch
        self.last_night: bool = day_phase(self.config, self.config.epoch).night
        self.last_bio_emit: dict[str, int] = {}
        self.warned_spans: int = 0
        self._trigger_seq = 0
        self._started = False

    # --- lifecycle ----------------------------------------------------------

    def start(self) -> list[dict]:
        """Initialize placements and activate the entry section."""
        assert not self._started, "session already started"
        self._started = True
        now = self.config.epoch
        for speaker in self.story.speakers:
            block = BlockPlacement(
                speaker=speaker.name,
                yaw=resolve_block_yaw(speaker.position, self.gaze.player_yaw),
                half_fov=self.config.half_fov,
            )
            block.visible = block.in_view(self.gaze.player_yaw)  # silent initial flags
            self.placements.append(block)
        out: list[dict] = []
        self._activate(self.story.entry, now, out)
        self.transcript.extend(out)
        return out

    # --- internals ----------------------------------------------------------

    def _placement(self, speaker: str) -> BlockPlacement:
        for block in self.placements:
            if block.speaker == speaker:
                return block
        raise KeyError(speaker)

    def _owner_block(self) -> BlockPlacement:
        section = self.story.section(self.current_section)
        return self._placement(section.speaker)

    def _clear_triggers(self) -> None:
        self.timers.clear()
        self.conditionals.clear()
        self.choices.clear()
        self.section_choice = None
        self.expects.clear()
        self.deferred.clear()
        self.registry.disarm_counters()

    def _arm_timerlike(self, item: TimerGoto | ConditionalGoto, now: int, owner: str) -> None:
        self._trigger_seq += 1
        if isinstance(item, TimerGoto):
            self.timers.append(
                TimerTrigger(now + item.delay_ms, item.target, owner, self._trigger_seq)
            )
        else:
            self.conditionals.append(
                ConditionalTrigger(
                    now + item.delay_ms, item.predicate, item.target, owner, self._trigger_seq
                )
            )

    def _activate(self, section_id: str, now: int, out: list[dict]) -> None:
        try:
            section = self.story.section(section_id)
        except KeyError:
            raise UnknownSectionError(section_id) from None
        self._clear_triggers()
        self.current_section = section_id
        owner_visible = self._placement(section.speaker).in_view(self.gaze.player_yaw)
        for item in section.items:
            if isinstance(item, Paragraph):
                for span in item.spans:
                    if span.kind == "choice":
                        self.choices.append(
                            ChoiceTrigger(span.span_id, span.target, section_id)
                        )
            elif isinstance(item, (TimerGoto, ConditionalGoto)):
                if owner_visible:
                    self._arm_timerlike(item, now, section_id)
                else:
                    self.deferred.append(item)
            elif isinstance(item, SectionChoice):
                self.section_choice = SectionChoiceTrigger(item.target, section_id)
            elif isinstance(item, Expect):
                self.expects.append(
                    ExpectTrigger(item.detector, item.source, item.target, section_id)
                )
                self.registry.arm_counter(item.detector)
        out.append(ev.section_activated(section_id, now))
        if owner_visible:
            out.append(ev.block_shown(section.speaker, now))
        else:
            out.append(ev.block_hidden(section.speaker, now))

    def _transition(self, target: str, cause: str, now: int, out: list[dict]) -> None:
        out.append(ev.transition_fired(self.current_section, target, cause, now))
        self._activate(target, now, out)

    def _check_day_phase(self, now: int, out: list[dict]) -> None:
        night = day_phase(self.config, now).night
        if night != self.last_night:
            self.last_night = night
            out.append(ev.day_phase_changed(night, now))

    def _select_span(self, span_id: str, now: int, out: list[dict]) -> None:
        found = self.story.find_span(span_id)
        if found is None or found[0].id != self.current_section:
            self.warned_spans += 1
            return
        if not self._owner_block().visible:
            return  # choices are selectable only while the block is in view
        for trigger in self.choices:
            if trigger.span_id == span_id:
                out.append(ev.choice_selected(span_id, now))
                self._transition(trigger.target, ev.CAUSE_CHOICE, now, out)
                return
        if self.section_choice is not None:
            out.append(ev.choice_selected(span_id, now))
            self._transition(self.section_choice.target, ev.CAUSE_SECTION_CHOICE, now, out)

    # --- input handlers -------------------------------------------------------

    def tick(self, now: int) -> list[dict]:
        """Advance the clock: day phase, due timers/conditionals, dwell."""
        if now < self.last_now:
            raise ClockRegressionError(f"clock moved back: {now} < {self.last_now}")
        self.last_now = now
        out: list[dict] = []
        self._check_day_phase(now, out)
        self.registry.update_stress(now)

        due: list[tuple[int, int, TimerTrigger | ConditionalTrigger]] = []
        for trig in self.timers:
            if trig.fire_at <= now:
                due.append((trig.fire_at, trig.seq, trig))
        for trig in self.conditionals:
            if trig.fire_at <= now:
                due.append((trig.fire_at, trig.seq, trig))
        due.sort(key=lambda item: (item[0], item[1]))
        day = day_phase(self.config, now)
        for _, _, trig in due:
            if isinstance(trig, TimerTrigger):
                self._transition(trig.target, ev.CAUSE_TIMER, now, out)
                break  # one transition per tick; activation cleared the rest
            if eval_predicate(trig.predicate, self.registry, day, now):
                self._transition(trig.target, ev.CAUSE_CONDITIONAL, now, out)
                break
            self.conditionals.remove(trig)  # evaluated once at expiry, discarded

        fired = update_dwell(self.gaze, self.gaze.hovered_span, now)
        if fired is not None:
            self._select_span(fired, now, out)
        self.transcript.extend(out)
        return out

    def on_player_input(self, kind: str, value, now: int) -> list[dict]:
        """Apply a yaw ("yaw", degrees) or hover ("hover", span id or None)."""
        out: list[dict] = []
        if kind == "yaw":
            self.gaze.player_yaw = wrap_degrees(float(value))
            owner = self.story.section(self.current_section).speaker
            for speaker, visible in update_view(self.placements, self.gaze.player_yaw):
                out.append(
                    ev.block_entered_view(speaker, now)
                    if visible
                    else ev.block_exited_view(speaker, now)
                )
                if speaker != owner:
                    continue
                if visible:
                    out.append(ev.block_shown(speaker, now))
                    for item in self.deferred:  # FOV gate lifts: arm at this now
                        self._arm_timerlike(item, now, self.current_section)
                    self.deferred.clear()
                else:
                    out.append(ev.block_hidden(speaker, now))
        elif kind == "hover":
            span_id = value
            if span_id is not None:
                found = self.story.find_span(span_id)
                if found is None or found[0].id != self.current_section:
                    self.warned_spans += 1
                    self.transcript.extend(out)
                    return out
            fired = update_dwell(self.gaze, span_id, now)
            if fired is not None:
                self._select_span(fired, now, out)
        else:
            raise ValueError(f"unknown player input {kind!r}")
        self.transcript.extend(out)
        return out

    def on_sample_line(self, line: str, now: int) -> list[dict]:
        """Ingest one sensor wire line; emits bio/detector/transition events."""
        from vif.physio import MalformedSampleError, decode_sample

        try:
            sample = decode_sample(line)
        except MalformedSampleError:
            self.registry.dropped_lines += 1
            return []
        return self.on_sample(sample, now)

    def on_sample(self, sample, now: int) -> list[dict]:
        out: list[dict] = []
        before_beats = len(self.registry.heart.beat_times)
        detector_events = self.registry.ingest(sample)
        if sample.v is not None and not sample.sig.startswith("sim."):
            if self._bio_due(sample.sig, now):
                out.append(ev.biofeedback_value(sample.sig, sample.v, now))
        elif len(self.registry.heart.beat_times) > before_beats:
            bpm = self.registry.heart.bpm(now)
            if bpm is not None and self._bio_due("heart", now):
                out.append(ev.biofeedback_bpm(round(bpm, 4), now))
        for detector_event in detector_events:
            self._dispatch_detector(detector_event, now, out)
        self.transcript.extend(out)
        return out

    def on_detector_event(self, event: DetectorEvent, now: int) -> list[dict]:
        out: list[dict] = []
        self._dispatch_detector(event, now, out)
        self.transcript.extend(out)
        return out

    def _dispatch_detector(self, event: DetectorEvent, now: int, out: list[dict]) -> None:
        for trigger in self.expects:
            if trigger.detector == event.detector and trigger.source == event.src:
                out.append(ev.detector_fired(str(event.detector), now))
                self._transition(trigger.target, ev.CAUSE_DETECTOR, now, out)
                return
        # unmatched detector events are ignored (wrong source or no Expect armed)

    def _bio_due(self, sig: str, now: int) -> bool:
        last = self.last_bio_emit.get(sig)
        if last is not None and now - last < self.config.bio_decimation_ms:
            return False
        self.last_bio_emit[sig] = now
        return True

    # --- inspection ------------------------------------------------------------

    def armed_trigger_owners(self) -> set[str]:
        owners = {t.owner for t in self.timers}
        owners |= {t.owner for t in self.conditionals}
        owners |= {t.owner for t in self.choices}
        owners |= {t.owner for t in self.expects}
        if self.section_choice is not None:
            owners.add(self.section_choice.owner)
        return owners


def start_session(story: Story, config: SessionConfig | None = None) -> tuple[Session, list[dict]]:
    """Build a session and activate the entry section."""
    session = Session(story, config)
    return session, session.start()
