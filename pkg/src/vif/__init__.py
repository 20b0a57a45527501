"""Physiology-driven interactive fiction engine.

Parses the .vif story markup, runs a deterministic narrative state
machine driven by timers, reader choices, head orientation, the virtual
day clock, and physiological detector events, and serves live sessions
to a browser reader.
"""

from vif.physio import (
    BreathDetector,
    DeepBreathCounter,
    HeartMonitor,
    Sample,
    SignalRegistry,
    StressParams,
    decode_sample,
    eval_predicate,
    heart_rate,
    stress_index,
)
from vif.runtime import (
    GameTime,
    Session,
    SessionConfig,
    day_phase,
    start_session,
)
from vif.script import (
    BUILTIN_SIGNALS,
    ConditionalGoto,
    DetectorSpec,
    Diagnostic,
    Expect,
    Paragraph,
    Section,
    SectionChoice,
    Span,
    Speaker,
    Story,
    TimerGoto,
    extract_spans,
    lint_story,
    normalize_section_id,
    parse_directive,
    parse_script,
    serialize_story,
)
from vif.session import run_headless
from vif.simulator import generate_lines, load_scenario, simulate
from vif.spatial import (
    BlockPlacement,
    GazeState,
    angular_distance,
    resolve_block_yaw,
    update_dwell,
    update_view,
)

__all__ = [
    "BUILTIN_SIGNALS",
    "BlockPlacement",
    "BreathDetector",
    "ConditionalGoto",
    "DeepBreathCounter",
    "DetectorSpec",
    "Diagnostic",
    "Expect",
    "GameTime",
    "GazeState",
    "HeartMonitor",
    "Paragraph",
    "Sample",
    "Section",
    "SectionChoice",
    "Session",
    "SessionConfig",
    "SignalRegistry",
    "Span",
    "Speaker",
    "Story",
    "StressParams",
    "TimerGoto",
    "angular_distance",
    "day_phase",
    "decode_sample",
    "eval_predicate",
    "extract_spans",
    "generate_lines",
    "heart_rate",
    "lint_story",
    "load_scenario",
    "normalize_section_id",
    "parse_directive",
    "parse_script",
    "resolve_block_yaw",
    "run_headless",
    "serialize_story",
    "simulate",
    "start_session",
    "stress_index",
    "update_dwell",
    "update_view",
]
