"""Angular placement, field-of-view visibility, and gaze-dwell selection.

Everything lives on a 1-D yaw circle: blocks sit at absolute headings,
visibility is an angular-distance threshold, and selection fires after
hovering a span for a dwell threshold. Pure state-transition functions,
owned by the runtime's single logical thread.
"""

from __future__ import annotations

from dataclasses import dataclass

CARDINAL_YAW = {"north": 0.0, "east": 90.0, "south": 180.0, "west": 270.0}
RELATIVE_YAW = {"front": 0.0, "right": 90.0, "behind": 180.0, "left": 270.0}

DEFAULT_HALF_FOV = 45.0
DEFAULT_DWELL_MS = 1000


def wrap_degrees(deg: float) -> float:
    return deg % 360.0


def resolve_block_yaw(position: str, player_yaw_at_activation: float) -> float:
    """Absolute heading for a position token; relative tokens add player yaw."""
    if position in CARDINAL_YAW:
        return CARDINAL_YAW[position]
    if position in RELATIVE_YAW:
        return wrap_degrees(RELATIVE_YAW[position] + player_yaw_at_activation)
    raise ValueError(f"unknown position token {position!r}")


def angular_distance(a: float, b: float) -> float:
    """Shortest arc between two headings, in [0, 180]."""
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


@dataclass
class BlockPlacement:
    speaker: str
    yaw: float  # absolute, [0, 360)
    half_fov: float = DEFAULT_HALF_FOV
    visible: bool = False

    def __post_init__(self):
        self.yaw = wrap_degrees(self.yaw)

    def in_view(self, player_yaw: float) -> bool:
        return angular_distance(self.yaw, player_yaw) <= self.half_fov


def update_view(placements: list[BlockPlacement], player_yaw: float) -> list[tuple[str, bool]]:
    """Refresh visibility flags; returns (speaker, now_visible) per change."""
    changes: list[tuple[str, bool]] = []
    for block in placements:
        now_visible = block.in_view(player_yaw)
        if now_visible != block.visible:
            block.visible = now_visible
            changes.append((block.speaker, now_visible))
    return changes


@dataclass
class GazeState:
    player_yaw: float = 0.0
    hovered_span: str | None = None
    hover_since: int | None = None
    dwell_threshold_ms: int = DEFAULT_DWELL_MS
    fired: bool = False  # current hover episode already selected


def update_dwell(gaze: GazeState, span_id: str | None, now: int) -> str | None:
    """Advance the dwell timer; returns the span id when a selection fires.

    A change of hovered span (including to/from none) resets the timer.
    After firing, the span cannot re-fire until hover leaves and returns.
    """
    if span_id != gaze.hovered_span:
        gaze.hovered_span = span_id
        gaze.hover_since = now if span_id is not None else None
        gaze.fired = False
        return None
    if span_id is None or gaze.fired or gaze.hover_since is None:
        return None
    if now - gaze.hover_since >= gaze.dwell_threshold_ms:
        gaze.fired = True
        return span_id
    return None
