"""Tests for yaw math, FOV visibility, and dwell selection."""

import random

import pytest
from hypothesis import given, strategies as st

from vif.spatial import (
    BlockPlacement,
    GazeState,
    angular_distance,
    resolve_block_yaw,
    update_dwell,
    update_view,
    wrap_degrees,
)


# --- resolve_block_yaw --------------------------------------------------------


def test_cardinal_mapping():
    assert resolve_block_yaw("north", 123.0) == 0.0
    assert resolve_block_yaw("east", 0.0) == 90.0
    assert resolve_block_yaw("south", 7.0) == 180.0
    assert resolve_block_yaw("west", 0.0) == 270.0


def test_relative_mapping():
    assert resolve_block_yaw("behind", 30.0) == 210.0
    assert resolve_block_yaw("front", 30.0) == 30.0
    assert resolve_block_yaw("right", 300.0) == 30.0
    assert resolve_block_yaw("left", 30.0) == 300.0


def test_unknown_position_raises():
    with pytest.raises(ValueError):
        resolve_block_yaw("up", 0.0)


@given(st.floats(0, 360, exclude_max=True), st.floats(-720, 720, allow_nan=False))
def test_relative_equivariance(yaw, delta):
    base = resolve_block_yaw("behind", yaw)
    shifted = resolve_block_yaw("behind", yaw + delta)
    assert angular_distance(wrap_degrees(base + delta), shifted) < 1e-6


# --- angular_distance -----------------------------------------------------------


def test_angular_distance_examples():
    assert angular_distance(0, 0) == 0.0
    assert angular_distance(350, 10) == 20.0
    assert angular_distance(0, 180) == 180.0


@given(
    st.floats(-1000, 1000, allow_nan=False),
    st.floats(-1000, 1000, allow_nan=False),
    st.floats(-1000, 1000, allow_nan=False),
)
def test_angular_distance_metric_properties(a, b, c):
    assert angular_distance(a, b) == pytest.approx(angular_distance(b, a))
    assert 0.0 <= angular_distance(a, b) <= 180.0
    assert angular_distance(a, c) <= angular_distance(a, b) + angular_distance(b, c) + 1e-6


# --- update_view -----------------------------------------------------------------


def test_invisible_block_stays_silent():
    block = BlockPlacement("x", yaw=170.0, visible=False)
    assert update_view([block], 0.0) == []
    assert not block.visible


def test_single_enter_event():
    block = BlockPlacement("x", yaw=170.0, visible=False)
    assert update_view([block], 150.0) == [("x", True)]
    assert update_view([block], 150.0) == []  # unchanged yaw, no event


def test_oscillation_alternates():
    block = BlockPlacement("x", yaw=170.0, visible=False)
    events = []
    for yaw in (150.0, 0.0, 150.0):
        events.extend(update_view([block], yaw))
    assert events == [("x", True), ("x", False), ("x", True)]


def test_boundary_is_inclusive():
    block = BlockPlacement("x", yaw=45.0, half_fov=45.0, visible=False)
    assert update_view([block], 0.0) == [("x", True)]


def test_random_trajectories_alternate():
    rng = random.Random(11)
    for _ in range(200):
        block = BlockPlacement("x", yaw=rng.uniform(0, 360), visible=False)
        flags = []
        for _ in range(50):
            flags.extend(vis for _, vis in update_view([block], rng.uniform(0, 360)))
        for first, second in zip(flags, flags[1:]):
            assert first != second  # entered/exited strictly alternate


# --- update_dwell -----------------------------------------------------------------


def test_dwell_fires_exactly_at_threshold():
    gaze = GazeState()
    assert update_dwell(gaze, "s3", 0) is None
    assert update_dwell(gaze, "s3", 999) is None
    assert update_dwell(gaze, "s3", 1000) == "s3"


def test_dwell_resets_on_span_change():
    gaze = GazeState()
    update_dwell(gaze, "s3", 0)
    update_dwell(gaze, "s4", 500)
    assert update_dwell(gaze, "s4", 1400) is None
    assert update_dwell(gaze, "s4", 1500) == "s4"


def test_no_hover_never_fires():
    gaze = GazeState()
    for t in range(0, 5000, 100):
        assert update_dwell(gaze, None, t) is None


def test_dwell_fires_once_per_episode():
    gaze = GazeState()
    update_dwell(gaze, "s3", 0)
    assert update_dwell(gaze, "s3", 1000) == "s3"
    assert update_dwell(gaze, "s3", 2000) is None
    assert update_dwell(gaze, "s3", 9000) is None
    # leave and return -> re-armed
    update_dwell(gaze, None, 9100)
    update_dwell(gaze, "s3", 9200)
    assert update_dwell(gaze, "s3", 10200) == "s3"


def test_dwell_respects_custom_threshold():
    gaze = GazeState(dwell_threshold_ms=250)
    update_dwell(gaze, "s1", 0)
    assert update_dwell(gaze, "s1", 249) is None
    assert update_dwell(gaze, "s1", 250) == "s1"
