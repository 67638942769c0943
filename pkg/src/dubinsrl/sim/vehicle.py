"""Planar vehicle kinematics: signed speed, bounded per-step turn, throttle dead zones."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InputError

MAX_SPEED = 300.0         # m/s
MAX_ACCEL = 600.0         # m/s^2
ACCEL_GAIN = 500.0        # m/s^2 commanded per unit of throttle
FRICTION_DECEL = 50.0     # m/s^2 opposing motion while coasting
MAX_TURN = math.pi / 3.0  # radians per control step at full deflection (60 deg)
THROTTLE_DEAD_ZONE = 0.15
STEER_DEAD_ZONE = 0.10
VEHICLE_LENGTH = 50.0     # m


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.remainder(theta, math.tau)
    if wrapped == -math.pi:
        return math.pi
    return wrapped


def clamp(value: float, low: float, high: float) -> float:
    return low if value < low else high if value > high else value


@dataclass(frozen=True)
class VehicleState:
    """Pose and motion of one vehicle.

    heading uses the math convention: radians, counter-clockwise positive,
    normalized to (-pi, pi]. speed is signed (negative while reversing).
    last_turn is the heading change applied by the most recent action.
    """

    x: float
    y: float
    heading: float = 0.0
    speed: float = 0.0
    accel: float = 0.0
    last_turn: float = 0.0

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def velocity(self) -> tuple[float, float]:
        return (self.speed * math.cos(self.heading), self.speed * math.sin(self.heading))


def apply_action(state: VehicleState, action, dt: float) -> VehicleState:
    """Advance one control step under a (throttle, steer) action in [-1, 1]^2.

    Throttle inside the +/-0.15 dead zone applies friction (up to 50 m/s^2
    opposing motion, stopping exactly at zero); outside it commands
    500 * throttle m/s^2, clamped to +/-600. Steering inside +/-0.1 does
    nothing; outside it turns by 60 deg * steer per step, positive steering
    turning right (clockwise, heading decreases). Speed is clamped to
    +/-300 m/s. The position update uses the new speed and new heading.
    """
    throttle = float(action[0])
    steer = float(action[1])
    if not (math.isfinite(throttle) and math.isfinite(steer)):
        raise InputError(f"non-finite action components: ({throttle}, {steer})")
    throttle = clamp(throttle, -1.0, 1.0)
    steer = clamp(steer, -1.0, 1.0)

    if abs(throttle) > THROTTLE_DEAD_ZONE:
        accel = clamp(ACCEL_GAIN * throttle, -MAX_ACCEL, MAX_ACCEL)
    elif state.speed == 0.0:
        accel = 0.0
    else:
        # Friction never drives speed through zero: cap the decel so that
        # speed + accel*dt lands exactly on 0 when |speed| < 50*dt.
        magnitude = min(FRICTION_DECEL, abs(state.speed) / dt)
        accel = -math.copysign(magnitude, state.speed)
    speed = clamp(state.speed + accel * dt, -MAX_SPEED, MAX_SPEED)

    if abs(steer) > STEER_DEAD_ZONE:
        turn = -MAX_TURN * steer
        heading = wrap_angle(state.heading + turn)
        last_turn = turn
    else:
        heading = state.heading
        last_turn = 0.0

    x = state.x + speed * math.cos(heading) * dt
    y = state.y + speed * math.sin(heading) * dt
    return VehicleState(x=x, y=y, heading=heading, speed=speed, accel=accel, last_turn=last_turn)
