import math

import numpy as np
import pytest

from dubinsrl.errors import InputError
from dubinsrl.sim import (
    MAX_ACCEL,
    MAX_SPEED,
    MAX_TURN,
    VehicleState,
    apply_action,
    wrap_angle,
)

DT = 0.1


def make_state(**kwargs):
    defaults = dict(x=0.0, y=0.0, heading=0.0, speed=0.0, accel=0.0, last_turn=0.0)
    defaults.update(kwargs)
    return VehicleState(**defaults)


def test_throttle_point_two_gives_100_accel():
    state = apply_action(make_state(), (0.2, 0.0), DT)
    assert state.accel == 100.0
    assert state.speed == 10.0


def test_friction_opposes_forward_motion():
    state = apply_action(make_state(speed=100.0), (0.0, 0.0), DT)
    assert state.accel == -50.0
    assert state.speed == 95.0


def test_friction_opposes_reverse_motion():
    state = apply_action(make_state(speed=-100.0), (0.0, 0.0), DT)
    assert state.accel == 50.0
    assert state.speed == -95.0


def test_friction_stops_exactly_at_zero():
    # |speed| below 50*dt must land on 0, not cross it
    state = apply_action(make_state(speed=3.0), (0.0, 0.0), DT)
    assert state.speed == 0.0
    state = apply_action(state, (0.0, 0.0), DT)
    assert state.speed == 0.0 and state.accel == 0.0


def test_full_right_turn_is_sixty_degrees():
    state = apply_action(make_state(), (0.0, 1.0), DT)
    assert state.heading == pytest.approx(-math.pi / 3, abs=1e-15)
    assert state.last_turn == pytest.approx(-math.pi / 3, abs=1e-15)


def test_half_left_turn_is_thirty_degrees():
    state = apply_action(make_state(), (0.0, -0.5), DT)
    assert state.heading == pytest.approx(math.pi / 6, abs=1e-15)


def test_throttle_dead_zone_boundary():
    # exactly 0.15 still coasts; just above commands acceleration
    state = apply_action(make_state(speed=100.0), (0.15, 0.0), DT)
    assert state.accel == -50.0
    state = apply_action(make_state(speed=100.0), (0.15000001, 0.0), DT)
    assert state.accel == pytest.approx(500.0 * 0.15000001)


def test_steer_dead_zone_boundary():
    state = apply_action(make_state(heading=1.0), (0.0, 0.1), DT)
    assert state.heading == 1.0 and state.last_turn == 0.0
    state = apply_action(make_state(heading=1.0), (0.0, 0.10000001), DT)
    assert state.heading != 1.0


def test_speed_clamped_at_maximum():
    state = apply_action(make_state(speed=300.0), (1.0, 0.0), DT)
    assert state.speed == 300.0
    state = apply_action(make_state(speed=-300.0), (-1.0, 0.0), DT)
    assert state.speed == -300.0


def test_accel_never_exceeds_600():
    for throttle in np.linspace(-1.0, 1.0, 41):
        state = apply_action(make_state(speed=200.0), (throttle, 0.0), DT)
        assert abs(state.accel) <= MAX_ACCEL


def test_position_update_uses_new_speed_and_heading():
    state = apply_action(make_state(speed=100.0), (0.0, 1.0), DT)
    # friction: speed 95; heading -pi/3
    assert state.x == pytest.approx(95.0 * math.cos(-math.pi / 3) * DT)
    assert state.y == pytest.approx(95.0 * math.sin(-math.pi / 3) * DT)


def test_non_finite_action_rejected():
    with pytest.raises(InputError):
        apply_action(make_state(), (float("nan"), 0.0), DT)
    with pytest.raises(InputError):
        apply_action(make_state(), (0.0, float("inf")), DT)


def test_invariants_hold_under_random_action_sequences():
    rng = np.random.default_rng(7)
    for _ in range(50):
        state = make_state(heading=float(rng.uniform(-math.pi, math.pi)))
        for _ in range(200):
            action = rng.uniform(-1.0, 1.0, size=2)
            state = apply_action(state, action, DT)
            assert abs(state.speed) <= MAX_SPEED
            assert abs(state.accel) <= MAX_ACCEL
            assert -math.pi < state.heading <= math.pi
            assert abs(state.last_turn) <= MAX_TURN


def test_wrap_angle_range_and_fixed_points():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    rng = np.random.default_rng(3)
    for theta in rng.uniform(-50.0, 50.0, size=500):
        w = wrap_angle(theta)
        assert -math.pi < w <= math.pi
        # same direction modulo full turns
        assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)
        assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-9)
