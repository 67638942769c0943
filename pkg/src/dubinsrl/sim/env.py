"""Episode-stepping worlds: single-vehicle goal reaching and 1v1 dogfight.

Both worlds are deterministic given (scenario, seed, action sequence). All
randomness flows through a per-reset seeded generator; instances share no
global state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import EpisodeDoneError, GeometryError, InputError, ScenarioError
from .geometry import blocking_segments, first_crossing
from .lidar import lidar_scan
from .rewards import (
    EVENT_GOAL_REACHED,
    EVENT_PROXIMITY_KILL,
    EVENT_TIMEOUT,
    EVENT_WALL_HIT,
    dogfight_reward,
    goal_reward,
)
from .scenario import Scenario
from .vehicle import (
    MAX_ACCEL,
    MAX_SPEED,
    MAX_TURN,
    VEHICLE_LENGTH,
    VehicleState,
    apply_action,
    wrap_angle,
)

GOAL_OBS_DIM = 14
DOGFIGHT_OBS_DIM = 9
ACTION_DIM = 2

_MAX_RESET_TRIES = 10000


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    events: frozenset
    achieved: tuple[float, float]


def goal_observation(state: VehicleState, scenario: Scenario) -> np.ndarray:
    """14-entry observation: 8 normalized lidar rays, velocity, acceleration,
    last turn, and heading. Lidar entries are in [0, 1], the rest in [-1, 1].
    The goal itself is not part of the observation; see goal_descriptor.
    """
    rays = lidar_scan(state, scenario) / scenario.lidar_range
    vx, vy = state.velocity()
    ax = state.accel * math.cos(state.heading)
    ay = state.accel * math.sin(state.heading)
    return np.concatenate([
        rays,
        [vx / MAX_SPEED, vy / MAX_SPEED,
         ax / MAX_ACCEL, ay / MAX_ACCEL,
         state.last_turn / MAX_TURN,
         state.heading / math.pi],
    ])


def goal_descriptor(position, goal, scenario: Scenario) -> np.ndarray:
    """Arena-normalized offset from the vehicle to a goal position."""
    return np.array([
        (goal[0] - position[0]) / scenario.width,
        (goal[1] - position[1]) / scenario.height,
    ])


def dogfight_observation(own: VehicleState, opponent: VehicleState,
                         scenario: Scenario) -> np.ndarray:
    """9-entry observation: own pose and velocity, opponent position, own
    last turn, and the signed bearing from own nose to the opponent."""
    vx, vy = own.velocity()
    bearing = wrap_angle(math.atan2(opponent.y - own.y, opponent.x - own.x) - own.heading)
    return np.array([
        own.x / scenario.width,
        own.y / scenario.height,
        own.heading / math.pi,
        vx / MAX_SPEED,
        vy / MAX_SPEED,
        opponent.x / scenario.width,
        opponent.y / scenario.height,
        own.last_turn / MAX_TURN,
        bearing / math.pi,
    ])


def sample_start(scenario: Scenario, rng: np.random.Generator,
                 keep_clear_of_goal: bool = True) -> VehicleState:
    """Uniform start pose, rejected while inside any obstacle inflated by the
    vehicle length or (optionally) within goal_radius of the goal."""
    inflated = [r.inflate(VEHICLE_LENGTH) for r in scenario.obstacles]
    gx, gy = scenario.goal
    for _ in range(_MAX_RESET_TRIES):
        x = rng.uniform(0.0, scenario.width)
        y = rng.uniform(0.0, scenario.height)
        if any(r.contains(x, y) for r in inflated):
            continue
        if keep_clear_of_goal and math.hypot(x - gx, y - gy) <= scenario.goal_radius:
            continue
        heading = wrap_angle(rng.uniform(-math.pi, math.pi))
        return VehicleState(x=x, y=y, heading=heading)
    raise ScenarioError("no feasible start region found after bounded rejection sampling")


def _resolve_motion(prev_pos, proposed: VehicleState, scenario: Scenario):
    """Clamp a motion segment that crosses a wall or obstacle edge.

    On contact the vehicle is placed one vehicle length inside the crossed
    edge (along its free-space normal) with speed and commanded acceleration
    zeroed. A bounded fix-up pass guarantees the result is inside the arena
    and not strictly inside any obstacle, whatever the local geometry.
    """
    segments = blocking_segments(scenario)
    hit = first_crossing(prev_pos, (proposed.x, proposed.y), segments)
    if hit is None:
        return proposed, False
    _, cx, cy, nx, ny = hit
    x = cx + VEHICLE_LENGTH * nx
    y = cy + VEHICLE_LENGTH * ny
    for _ in range(8):
        clamped_x = min(max(x, 0.0), scenario.width)
        clamped_y = min(max(y, 0.0), scenario.height)
        moved = (clamped_x != x) or (clamped_y != y)
        x, y = clamped_x, clamped_y
        for rect in scenario.obstacles:
            if rect.contains(x, y, strict=True):
                # project out through the nearest face
                exits = [
                    (x - rect.min_x, rect.min_x, None),
                    (rect.max_x - x, rect.max_x, None),
                    (y - rect.min_y, None, rect.min_y),
                    (rect.max_y - y, None, rect.max_y),
                ]
                _, ex, ey = min(exits, key=lambda e: e[0])
                x = ex if ex is not None else x
                y = ey if ey is not None else y
                moved = True
                break
        if not moved:
            break
    return replace(proposed, x=x, y=y, speed=0.0, accel=0.0), True


class GoalReachEnv:
    """Single-vehicle world: reach a fixed goal region inside a walled arena.

    Wall contact is not terminal (clamp, stop, penalty); reaching the goal
    or running out of steps ends the episode.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._state: VehicleState | None = None
        self._steps = 0
        self._done = True

    @property
    def state(self) -> VehicleState:
        if self._state is None:
            raise EpisodeDoneError("environment has not been reset")
        return self._state

    @property
    def steps(self) -> int:
        return self._steps

    @property
    def done(self) -> bool:
        return self._done

    def reset(self, seed: int) -> tuple[VehicleState, np.ndarray]:
        rng = np.random.default_rng(seed)
        self._state = sample_start(self.scenario, rng)
        self._steps = 0
        self._done = False
        return self._state, goal_observation(self._state, self.scenario)

    def observe(self) -> np.ndarray:
        return goal_observation(self.state, self.scenario)

    def step(self, action) -> StepResult:
        if self._done or self._state is None:
            raise EpisodeDoneError("step called on a finished episode; reset first")
        scn = self.scenario
        prev = self._state
        proposed = apply_action(prev, action, scn.dt)
        state, hit = _resolve_motion(prev.position, proposed, scn)
        events = set()
        if hit:
            events.add(EVENT_WALL_HIT)
        self._steps += 1
        gx, gy = scn.goal
        if math.hypot(state.x - gx, state.y - gy) <= scn.goal_radius:
            events.add(EVENT_GOAL_REACHED)
        elif self._steps >= scn.max_steps:
            events.add(EVENT_TIMEOUT)
        done = EVENT_GOAL_REACHED in events or EVENT_TIMEOUT in events
        reward = goal_reward(prev.position, state.position, scn.goal, events, scn)
        self._state = state
        self._done = done
        return StepResult(
            observation=goal_observation(state, scn),
            reward=reward,
            done=done,
            events=frozenset(events),
            achieved=state.position,
        )


class DogfightWorld:
    """Two vehicles advancing simultaneously, each rewarded on the post-step
    engagement geometry. One shared step counter; closing inside r_min ends
    the episode for both."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._vehicles: list[VehicleState] | None = None
        self._steps = 0
        self._done = True

    @property
    def vehicles(self) -> tuple[VehicleState, VehicleState]:
        if self._vehicles is None:
            raise EpisodeDoneError("world has not been reset")
        return tuple(self._vehicles)

    @property
    def steps(self) -> int:
        return self._steps

    @property
    def done(self) -> bool:
        return self._done

    def reset(self, seed: int) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(seed)
        for _ in range(_MAX_RESET_TRIES):
            a = sample_start(self.scenario, rng, keep_clear_of_goal=False)
            b = sample_start(self.scenario, rng, keep_clear_of_goal=False)
            if math.hypot(a.x - b.x, a.y - b.y) >= 2.0 * self.scenario.r_min:
                break
        else:
            raise ScenarioError("could not place two vehicles at a viable separation")
        self._vehicles = [a, b]
        self._steps = 0
        self._done = False
        return self.observe(0), self.observe(1)

    def observe(self, agent_id: int) -> np.ndarray:
        if agent_id not in (0, 1):
            raise InputError(f"agent_id must be 0 or 1, got {agent_id}")
        own = self.vehicles[agent_id]
        opp = self.vehicles[1 - agent_id]
        return dogfight_observation(own, opp, self.scenario)

    def step(self, action0, action1) -> tuple[StepResult, StepResult]:
        if self._done or self._vehicles is None:
            raise EpisodeDoneError("step called on a finished episode; reset first")
        scn = self.scenario
        prev = list(self._vehicles)
        states = []
        hits = []
        for vehicle, action in zip(prev, (action0, action1)):
            proposed = apply_action(vehicle, action, scn.dt)
            state, hit = _resolve_motion(vehicle.position, proposed, scn)
            states.append(state)
            hits.append(hit)
        self._vehicles = states
        self._steps += 1

        separation = math.hypot(states[0].x - states[1].x, states[0].y - states[1].y)
        shared_events = set()
        if separation < scn.r_min:
            shared_events.add(EVENT_PROXIMITY_KILL)
        elif self._steps >= scn.max_steps:
            shared_events.add(EVENT_TIMEOUT)
        done = bool(shared_events)
        self._done = done

        results = []
        for i in (0, 1):
            events = set(shared_events)
            reward = dogfight_reward(states[i], states[1 - i], scn)
            if hits[i]:
                events.add(EVENT_WALL_HIT)
                reward += scn.wall_penalty
            results.append(StepResult(
                observation=dogfight_observation(states[i], states[1 - i], scn),
                reward=reward,
                done=done,
                events=frozenset(events),
                achieved=states[i].position,
            ))
        return results[0], results[1]
