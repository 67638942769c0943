"""Reward functions for goal reaching and for the 1v1 engagement geometry."""

from __future__ import annotations

import math

from ..errors import GeometryError, InputError
from .scenario import Scenario
from .vehicle import VehicleState

EVENT_WALL_HIT = "wall_hit"
EVENT_GOAL_REACHED = "goal_reached"
EVENT_TIMEOUT = "timeout"
# Emitted only by the dogfight world when the two vehicles close inside r_min.
EVENT_PROXIMITY_KILL = "proximity_kill"


def goal_reward(prev_pos, new_pos, goal, events, scenario: Scenario) -> float:
    """Per-step reward: distance penalty, plus wall and goal terms when flagged.

    reward = -distance_coeff * |new_pos - goal|, then wall_penalty is added
    on a wall_hit event and goal_bonus on a goal_reached event.
    """
    nx, ny = float(new_pos[0]), float(new_pos[1])
    gx, gy = float(goal[0]), float(goal[1])
    if not all(map(math.isfinite, (nx, ny, gx, gy))):
        raise InputError("non-finite position passed to goal_reward")
    reward = -scenario.distance_coeff * math.hypot(nx - gx, ny - gy)
    if EVENT_WALL_HIT in events:
        reward += scenario.wall_penalty
    if EVENT_GOAL_REACHED in events:
        reward += scenario.goal_bonus
    return reward


def _angle_between(ux: float, uy: float, vx: float, vy: float) -> float:
    """Unsigned angle between two non-zero vectors, in [0, pi]."""
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


def aa_ata(attacker: VehicleState, target: VehicleState) -> tuple[float, float]:
    """Aspect angle and antenna train angle of an attacker/target pair.

    ATA is the angle at the attacker between its nose and the line of sight
    to the target; AA is the angle at the target between its tail direction
    and the line of sight back to the attacker. Both are unsigned, in
    [0, pi]; (0, 0) means the attacker sits aligned directly astern.
    """
    losx = target.x - attacker.x
    losy = target.y - attacker.y
    if losx == 0.0 and losy == 0.0:
        raise GeometryError("aa_ata undefined for coincident vehicles")
    ata = _angle_between(math.cos(attacker.heading), math.sin(attacker.heading), losx, losy)
    tail_x = -math.cos(target.heading)
    tail_y = -math.sin(target.heading)
    aa = _angle_between(tail_x, tail_y, -losx, -losy)
    return aa, ata


def dogfight_reward(attacker: VehicleState, target: VehicleState, scenario: Scenario) -> float:
    """Engagement reward from the attacker's point of view.

    Inside r_min the pairing counts as a collision (g_collision for either
    ordering). Within (r_min, r_max) the attacker scores g_advantage in the
    firing cone (AA < aa_fire and ATA < ata_fire) and g_disadvantage when
    being tracked from behind (ATA > ata_tail and AA > aa_tail). Everything
    else, including separations at or beyond r_max, is worth 0.
    """
    separation = math.hypot(target.x - attacker.x, target.y - attacker.y)
    if separation < scenario.r_min:
        return scenario.g_collision
    if scenario.r_min < separation < scenario.r_max:
        aa, ata = aa_ata(attacker, target)
        if aa < scenario.aa_fire and ata < scenario.ata_fire:
            return scenario.g_advantage
        if ata > scenario.ata_tail and aa > scenario.aa_tail:
            return scenario.g_disadvantage
    return 0.0
