"""Engine event records and the frozen JSON-lines transcript format.

Events are plain dicts built by the constructors below; key order is
part of the wire format and golden transcripts compare byte-for-byte.
"""

from __future__ import annotations

import json

# transition causes
CAUSE_TIMER = "timer"
CAUSE_CONDITIONAL = "conditional"
CAUSE_CHOICE = "choice"
CAUSE_SECTION_CHOICE = "section_choice"
CAUSE_DETECTOR = "detector"


def section_activated(section_id: str, t: int) -> dict:
    return {"ev": "section", "id": section_id, "t": t}


def block_shown(speaker: str, t: int) -> dict:
    return {"ev": "block_shown", "speaker": speaker, "t": t}


def block_hidden(speaker: str, t: int) -> dict:
    return {"ev": "block_hidden", "speaker": speaker, "t": t}


def block_entered_view(speaker: str, t: int) -> dict:
    return {"ev": "block_entered", "speaker": speaker, "t": t}


def block_exited_view(speaker: str, t: int) -> dict:
    return {"ev": "block_exited", "speaker": speaker, "t": t}


def choice_selected(span_id: str, t: int) -> dict:
    return {"ev": "choice", "span": span_id, "t": t}


def transition_fired(from_id: str, to_id: str, cause: str, t: int) -> dict:
    return {"ev": "transition", "from": from_id, "to": to_id, "cause": cause, "t": t}


def detector_fired(detector: str, t: int) -> dict:
    return {"ev": "detector", "detector": detector, "t": t}


def day_phase_changed(night: bool, t: int) -> dict:
    return {"ev": "day_phase", "night": night, "t": t}


def biofeedback_value(sig: str, value: float, t: int) -> dict:
    return {"ev": "bio", "sig": sig, "value": value, "t": t}


def biofeedback_bpm(bpm: float, t: int) -> dict:
    return {"ev": "bio", "sig": "heart", "bpm": bpm, "t": t}


def dump_event(event: dict) -> str:
    """One transcript line; separators and key order are frozen."""
    return json.dumps(event, separators=(",", ":"), ensure_ascii=False)


def parse_event(line: str) -> dict:
    return json.loads(line)


def dump_transcript(events: list[dict]) -> str:
    return "".join(dump_event(ev) + "\n" for ev in events)
