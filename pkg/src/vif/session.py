"""Session entry points: message codecs and the headless player.

The headless player merges a sensor scenario and a player-input script
into one time-ordered queue with synthetic ticks, runs the story to the
scenario's end, and writes the transcript. It is the determinism
harness: same inputs, byte-identical output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from vif import events as ev
from vif.runtime import Session, SessionConfig, start_session
from vif.script import errors, lint_story, parse_script
from vif.simulator import BadScenarioError, generate_lines, load_scenario

PROTOCOL_VERSION = 1
TICK_MS = 50

EXIT_OK = 0
EXIT_LINT = 2
EXIT_BAD_INPUT = 3


class MalformedClientMessageError(ValueError):
    """Client frame is not a valid protocol message."""


class BadInputScriptError(ValueError):
    """Player-input script line is unparseable."""


# --- client messages ---------------------------------------------------------


@dataclass(frozen=True)
class Hello:
    protocol_version: int


@dataclass(frozen=True)
class Yaw:
    deg: float


@dataclass(frozen=True)
class Hover:
    span_id: str | None


@dataclass(frozen=True)
class SensorLine:
    """One sensor wire record tunnelled over the client channel.

    Browsers cannot open raw TCP/UDP sockets, so the reader UI's sensor
    panel ships its simulated samples through the WebSocket; the server
    feeds them into the same ingestion path as the sensor port.
    """

    line: str


ClientMessage = Hello | Yaw | Hover | SensorLine


def decode_client_message(text: str) -> ClientMessage:
    """Decode one client frame; unknown fields ignored, unknown type rejected."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise MalformedClientMessageError(f"bad JSON: {err}") from None
    if not isinstance(obj, dict):
        raise MalformedClientMessageError("frame is not an object")
    kind = obj.get("type")
    if kind == "yaw":
        deg = obj.get("deg")
        if isinstance(deg, bool) or not isinstance(deg, (int, float)) or not math.isfinite(deg):
            raise MalformedClientMessageError(f"bad yaw: {deg!r}")
        return Yaw(deg=float(deg))
    if kind == "hover":
        span = obj.get("span")
        if span is not None and not isinstance(span, str):
            raise MalformedClientMessageError(f"bad span: {span!r}")
        return Hover(span_id=span)
    if kind == "sensor":
        line = obj.get("line")
        if not isinstance(line, str) or not line:
            raise MalformedClientMessageError(f"bad sensor line: {line!r}")
        return SensorLine(line=line)
    if kind == "hello":
        version = obj.get("protocol")
        if version != PROTOCOL_VERSION:
            raise MalformedClientMessageError(f"unsupported protocol: {version!r}")
        return Hello(protocol_version=version)
    raise MalformedClientMessageError(f"unknown type: {kind!r}")


def encode_client_message(msg: ClientMessage) -> str:
    if isinstance(msg, Yaw):
        return json.dumps({"type": "yaw", "deg": float(msg.deg)}, separators=(",", ":"))
    if isinstance(msg, Hover):
        return json.dumps({"type": "hover", "span": msg.span_id}, separators=(",", ":"))
    if isinstance(msg, SensorLine):
        return json.dumps({"type": "sensor", "line": msg.line}, separators=(",", ":"))
    if isinstance(msg, Hello):
        return json.dumps(
            {"type": "hello", "protocol": msg.protocol_version}, separators=(",", ":")
        )
    raise MalformedClientMessageError(f"unknown message {msg!r}")


# --- server messages ----------------------------------------------------------


def scene_message(session: Session) -> dict:
    """Current scene snapshot: sent on connect and after every transition."""
    from vif.runtime import day_phase

    story = session.story
    section = story.section(session.current_section)
    spans = []
    for span in section.spans():
        record: dict = {"id": span.span_id, "kind": span.kind, "text": span.text}
        if span.kind == "choice":
            record["target"] = span.target
        elif span.kind == "biofeedback":
            record["signal"] = span.signal
            record["style"] = span.style
            record["active"] = span.active
        spans.append(record)
    speakers = []
    for sp in story.speakers:
        block = session._placement(sp.name)
        speakers.append(
            {
                "name": sp.name,
                "yaw": block.yaw,
                "style": sp.style,
                "size": sp.size,
                "visible": block.visible,
            }
        )
    gt = day_phase(session.config, session.last_now)
    owner = session._placement(section.speaker)
    return {
        "type": "scene",
        "protocol": PROTOCOL_VERSION,
        "section": {
            "id": section.id,
            "display_name": section.display_name,
            "speaker": section.speaker,
            "spans": spans,
            "visible": owner.visible,
            "section_choice": session.section_choice is not None,
        },
        "speakers": speakers,
        "day": {
            "fraction": round(gt.fraction, 6),
            "azimuth": round(gt.sun_azimuth, 4),
            "elevation": round(gt.sun_elevation, 4),
            "night": gt.night,
        },
        "half_fov": session.config.half_fov,
        "dwell_threshold_ms": session.config.dwell_threshold_ms,
    }


def event_message(event: dict) -> dict:
    return {"type": "event", "event": event}


def bio_message(event: dict) -> dict:
    msg = {"type": "bio", "sig": event["sig"]}
    if "bpm" in event:
        msg["bpm"] = event["bpm"]
    else:
        msg["value"] = event["value"]
    return msg


def error_message(reason: str) -> dict:
    return {"type": "error", "reason": reason}


def encode_server_message(msg: dict) -> str:
    return json.dumps(msg, separators=(",", ":"), ensure_ascii=False)


def decode_server_message(text: str) -> dict:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "type" not in obj:
        raise MalformedClientMessageError("bad server frame")
    return obj


# --- player-input scripts -------------------------------------------------------


@dataclass(frozen=True)
class PlayerInput:
    at: int
    kind: str  # "yaw" | "hover"
    value: float | str | None


def parse_input_script(lines) -> list[PlayerInput]:
    inputs: list[PlayerInput] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise BadInputScriptError(f"line {lineno}: bad JSON: {err}") from None
        if not isinstance(obj, dict):
            raise BadInputScriptError(f"line {lineno}: not an object")
        at = obj.get("at")
        cmd = obj.get("cmd")
        if isinstance(at, bool) or not isinstance(at, int) or at < 0:
            raise BadInputScriptError(f"line {lineno}: bad 'at': {at!r}")
        if cmd == "yaw":
            deg = obj.get("deg")
            if isinstance(deg, bool) or not isinstance(deg, (int, float)):
                raise BadInputScriptError(f"line {lineno}: bad 'deg': {deg!r}")
            inputs.append(PlayerInput(at=at, kind="yaw", value=float(deg)))
        elif cmd == "hover":
            span = obj.get("span")
            if span is not None and not isinstance(span, str):
                raise BadInputScriptError(f"line {lineno}: bad 'span': {span!r}")
            inputs.append(PlayerInput(at=at, kind="hover", value=span))
        else:
            raise BadInputScriptError(f"line {lineno}: unknown cmd {cmd!r}")
    return inputs


def load_input_script(path: str | Path) -> list[PlayerInput]:
    return parse_input_script(Path(path).read_text(encoding="utf-8").splitlines())


# --- headless run ------------------------------------------------------------------

# queue priorities at equal timestamps: sensor samples land first, then
# player inputs, then the tick that processes them
_PRIO_SAMPLE = 0
_PRIO_INPUT = 1
_PRIO_TICK = 2


def merged_queue(
    sample_lines: list[str],
    inputs: list[PlayerInput],
    end_at: int,
    tick_ms: int = TICK_MS,
) -> list[tuple[int, int, int, str, object]]:
    records: list[tuple[int, int, int, str, object]] = []
    seq = 0
    for line in sample_lines:
        t = json.loads(line)["t"]
        if t <= end_at:
            records.append((t, _PRIO_SAMPLE, seq, "sample", line))
        seq += 1
    for item in inputs:
        if item.at <= end_at:
            records.append((item.at, _PRIO_INPUT, seq, item.kind, item.value))
        seq += 1
    for t in range(0, end_at + 1, tick_ms):
        records.append((t, _PRIO_TICK, seq, "tick", None))
        seq += 1
    records.sort(key=lambda r: (r[0], r[1], r[2]))
    return records


def drive_session(session: Session, records) -> None:
    for t, _, _, kind, payload in records:
        if kind == "tick":
            session.tick(t)
        elif kind == "sample":
            session.on_sample_line(payload, t)
        else:
            session.on_player_input(kind, payload, t)


def run_headless(
    story_path: str | Path,
    scenario_path: str | Path | None = None,
    input_script_path: str | Path | None = None,
    seed: int = 0,
    out_path: str | Path | None = None,
    config: SessionConfig | None = None,
) -> int:
    """Play a story against scripted sensors and inputs; write the transcript.

    Exit codes: 0 success, 2 lint errors, 3 bad scenario or input script.
    """
    source = Path(story_path).read_text(encoding="utf-8")
    story, diagnostics = parse_script(source, str(story_path))
    diagnostics += lint_story(story)
    if errors(diagnostics):
        for d in errors(diagnostics):
            print(json.dumps(d.to_json(), separators=(",", ":")))
        return EXIT_LINT

    try:
        sample_lines: list[str] = []
        end_at = 0
        if scenario_path is not None:
            commands = load_scenario(scenario_path)
            sample_lines = generate_lines(commands, seed)
            end_at = commands[-1].at
        inputs: list[PlayerInput] = []
        if input_script_path is not None:
            inputs = load_input_script(input_script_path)
    except (BadScenarioError, BadInputScriptError, OSError) as err:
        print(str(err))
        return EXIT_BAD_INPUT
    if scenario_path is None and inputs:
        end_at = max(item.at for item in inputs)

    session, _ = start_session(story, config or SessionConfig(seed=seed))
    drive_session(session, merged_queue(sample_lines, inputs, end_at))

    transcript = ev.dump_transcript(session.transcript)
    if out_path is not None:
        Path(out_path).write_text(transcript, encoding="utf-8")
    else:
        print(transcript, end="")
    return EXIT_OK
