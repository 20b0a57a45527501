"""Deterministic sensor simulator: replays a scenario file as a wire stream.

Stands in for real breathing belts and heart-rate straps. Identical
(scenario, seed) pairs produce byte-identical output, which is what the
golden-transcript tests lean on.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable

BREATH_SAMPLE_MS = 100
BREATH_SRC = "bits"
HEART_SRC = "polar"
FLAG_SRC = "sim"

DEFAULT_BPM = 70.0
DEFAULT_JITTER_MS = 0.0
DEFAULT_BREATH_RATE = 12.0  # cycles per minute
DEFAULT_BREATH_AMP = 0.35
DEEP_BREATH_AMP = 0.45

_SET_KEYS = ("heart.bpm", "heart.jitter_ms", "breath.rate", "breath.amp")


class BadScenarioError(ValueError):
    """Scenario file is unparseable or violates ordering rules."""


@dataclass(frozen=True)
class ScenarioCommand:
    at: int
    cmd: str  # "set" | "deepbreath" | "end"
    key: str = ""
    val: float | bool = 0.0
    n: int = 0


def parse_scenario(lines: Iterable[str]) -> list[ScenarioCommand]:
    commands: list[ScenarioCommand] = []
    last_at = -1
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise BadScenarioError(f"line {lineno}: bad JSON: {err}") from None
        if not isinstance(obj, dict):
            raise BadScenarioError(f"line {lineno}: not an object")
        at = obj.get("at")
        cmd = obj.get("cmd")
        if isinstance(at, bool) or not isinstance(at, int) or at < 0:
            raise BadScenarioError(f"line {lineno}: bad 'at': {at!r}")
        if at < last_at:
            raise BadScenarioError(f"line {lineno}: timestamps decrease ({at} < {last_at})")
        last_at = at
        if cmd == "set":
            key = obj.get("key")
            val = obj.get("val")
            if not isinstance(key, str) or (
                key not in _SET_KEYS and not key.startswith("sim.")
            ):
                raise BadScenarioError(f"line {lineno}: unknown key {key!r}")
            if key.startswith("sim."):
                if not isinstance(val, bool):
                    raise BadScenarioError(f"line {lineno}: {key} needs a boolean")
            elif isinstance(val, bool) or not isinstance(val, (int, float)) or val < 0:
                raise BadScenarioError(f"line {lineno}: {key} needs a non-negative number")
            commands.append(ScenarioCommand(at=at, cmd="set", key=key, val=val))
        elif cmd == "deepbreath":
            n = obj.get("n")
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise BadScenarioError(f"line {lineno}: deepbreath needs n >= 1")
            commands.append(ScenarioCommand(at=at, cmd="deepbreath", n=n))
        elif cmd == "end":
            commands.append(ScenarioCommand(at=at, cmd="end"))
        else:
            raise BadScenarioError(f"line {lineno}: unknown cmd {cmd!r}")
    if not commands or commands[-1].cmd != "end":
        raise BadScenarioError("scenario must finish with an 'end' command")
    if any(c.cmd == "end" for c in commands[:-1]):
        raise BadScenarioError("'end' must be the last command")
    return commands


def load_scenario(path: str | Path) -> list[ScenarioCommand]:
    return parse_scenario(Path(path).read_text(encoding="utf-8").splitlines())


def _wire(t: int, src: str, sig: str, *, v: float | None = None, ev: str | None = None) -> str:
    record: dict = {"t": t, "src": src, "sig": sig}
    if v is not None:
        record["v"] = round(v, 4)
    else:
        record["ev"] = ev
    return json.dumps(record, separators=(",", ":"))


def _breath_stream(commands: list[ScenarioCommand], end_at: int) -> list[tuple[int, int, str]]:
    rate = Fraction(DEFAULT_BREATH_RATE)
    base_amp = DEFAULT_BREATH_AMP
    amp = base_amp
    deep_left = 0
    cycle_pos = Fraction(0)
    cycle_index = -1  # so the first sample selects the first cycle's amplitude
    cursor = 0
    out: list[tuple[int, int, str]] = []
    prev_t = 0
    for t in range(0, end_at + 1, BREATH_SAMPLE_MS):
        while cursor < len(commands) and commands[cursor].at <= t:
            cmd = commands[cursor]
            if cmd.cmd == "deepbreath":
                deep_left += cmd.n
            elif cmd.cmd == "set" and cmd.key == "breath.rate":
                rate = Fraction(str(cmd.val))
            elif cmd.cmd == "set" and cmd.key == "breath.amp":
                base_amp = float(cmd.val)
            cursor += 1
        cycle_pos += rate * (t - prev_t) / 60_000
        prev_t = t
        if int(cycle_pos) > cycle_index:
            cycle_index = int(cycle_pos)
            if deep_left > 0:
                amp = DEEP_BREATH_AMP
                deep_left -= 1
            else:
                amp = base_amp
        phase = float(cycle_pos - int(cycle_pos))
        v = 0.5 + amp * math.sin(2.0 * math.pi * phase)
        out.append((t, 1, _wire(t, BREATH_SRC, "breath", v=v)))
    return out


def _heart_stream(
    commands: list[ScenarioCommand], end_at: int, rng: random.Random
) -> list[tuple[int, int, str]]:
    bpm = DEFAULT_BPM
    jitter = DEFAULT_JITTER_MS
    cursor = 0
    next_beat = 0.0
    out: list[tuple[int, int, str]] = []
    while True:
        beat_t = round(next_beat)
        if beat_t > end_at:
            break
        while cursor < len(commands) and commands[cursor].at <= next_beat:
            cmd = commands[cursor]
            if cmd.cmd == "set" and cmd.key == "heart.bpm":
                bpm = float(cmd.val)
            elif cmd.cmd == "set" and cmd.key == "heart.jitter_ms":
                jitter = float(cmd.val)
            cursor += 1
        out.append((beat_t, 2, _wire(beat_t, HEART_SRC, "heart", ev="beat")))
        next_beat += 60_000.0 / bpm + rng.uniform(-jitter, jitter)
    return out


def _flag_stream(commands: list[ScenarioCommand]) -> list[tuple[int, int, str]]:
    out: list[tuple[int, int, str]] = []
    for cmd in commands:
        if cmd.cmd == "set" and cmd.key.startswith("sim."):
            out.append(
                (cmd.at, 0, _wire(cmd.at, FLAG_SRC, cmd.key, ev="true" if cmd.val else "false"))
            )
    return out


def generate_lines(commands: list[ScenarioCommand], seed: int = 0) -> list[str]:
    """All wire lines for a scenario, in time order (flags, breath, heart)."""
    end_at = commands[-1].at
    rng = random.Random(seed)
    merged = _flag_stream(commands) + _breath_stream(commands, end_at) + _heart_stream(
        commands, end_at, rng
    )
    merged.sort(key=lambda item: (item[0], item[1]))
    return [line for _, _, line in merged]


def simulate(
    scenario: str | Path | list[ScenarioCommand],
    seed: int,
    emit: Callable[[str], None],
) -> None:
    """Run a scenario to completion, handing each wire line to ``emit``."""
    commands = scenario if isinstance(scenario, list) else load_scenario(scenario)
    for line in generate_lines(commands, seed):
        emit(line)
