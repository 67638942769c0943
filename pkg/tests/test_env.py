import math

import numpy as np
import pytest

from dubinsrl.errors import EpisodeDoneError, InputError
from dubinsrl.sim import (
    EVENT_GOAL_REACHED,
    EVENT_PROXIMITY_KILL,
    EVENT_TIMEOUT,
    EVENT_WALL_HIT,
    DogfightWorld,
    GoalReachEnv,
    Rect,
    Scenario,
    VehicleState,
    VEHICLE_LENGTH,
    empty_arena,
    obstacle_course,
)

from helpers import random_scenario


def test_reset_is_deterministic_in_seed():
    env = GoalReachEnv(empty_arena())
    s1, o1 = env.reset(123)
    s2, o2 = env.reset(123)
    assert s1 == s2
    assert np.array_equal(o1, o2)


def test_reset_observation_shape_and_ranges():
    env = GoalReachEnv(obstacle_course())
    _, obs = env.reset(5)
    assert obs.shape == (14,)
    assert np.all(obs[:8] >= 0.0) and np.all(obs[:8] <= 1.0)
    assert np.all(obs[8:] >= -1.0) and np.all(obs[8:] <= 1.0)


def test_reset_never_starts_inside_inflated_obstacle_or_goal():
    scn = obstacle_course()
    env = GoalReachEnv(scn)
    inflated = [r.inflate(VEHICLE_LENGTH) for r in scn.obstacles]
    for seed in range(2000):
        state, _ = env.reset(seed)
        assert not any(r.contains(state.x, state.y) for r in inflated)
        assert math.hypot(state.x - scn.goal[0], state.y - scn.goal[1]) > scn.goal_radius
        assert state.speed == 0.0 and state.accel == 0.0


def test_full_throttle_speed_staircase():
    env = GoalReachEnv(empty_arena(width=100000.0, height=100000.0, goal=(90000.0, 90000.0)))
    env._state = VehicleState(x=1000.0, y=50000.0, heading=0.0)
    env._done = False
    expected = [50.0 * k for k in range(1, 7)] + [300.0, 300.0]
    for want in expected:
        result = env.step((1.0, 0.0))
        assert env.state.speed == min(want, 300.0)
        assert not result.done


def test_goal_containment_terminates_with_bonus():
    scn = empty_arena()
    env = GoalReachEnv(scn)
    env.reset(0)
    env._state = VehicleState(x=scn.goal[0] - 10.0, y=scn.goal[1], heading=0.0)
    result = env.step((0.0, 0.0))
    assert EVENT_GOAL_REACHED in result.events
    assert result.done
    assert result.reward > 9999.0


def test_wall_hit_clamps_stops_penalizes_but_continues():
    scn = empty_arena()
    env = GoalReachEnv(scn)
    env.reset(0)
    env._state = VehicleState(x=20.0, y=2000.0, heading=math.pi, speed=300.0)
    result = env.step((1.0, 0.0))  # drive straight into the west wall
    assert EVENT_WALL_HIT in result.events
    assert not result.done
    assert result.reward < -99.0
    state = env.state
    assert state.speed == 0.0 and state.accel == 0.0
    assert 0.0 <= state.x <= scn.width
    assert state.x == pytest.approx(VEHICLE_LENGTH, abs=1e-9)


def test_timeout_ends_episode():
    scn = empty_arena(max_steps=5)
    env = GoalReachEnv(scn)
    env.reset(1)
    for _ in range(4):
        result = env.step((0.0, 0.0))
        assert not result.done
    result = env.step((0.0, 0.0))
    assert result.done and EVENT_TIMEOUT in result.events


def test_step_after_done_raises():
    env = GoalReachEnv(empty_arena(max_steps=1))
    env.reset(2)
    env.step((0.0, 0.0))
    with pytest.raises(EpisodeDoneError):
        env.step((0.0, 0.0))


def test_done_iff_goal_or_timeout():
    scn = empty_arena(max_steps=50)
    env = GoalReachEnv(scn)
    rng = np.random.default_rng(3)
    for seed in range(20):
        env.reset(seed)
        while True:
            result = env.step(rng.uniform(-1, 1, size=2))
            assert result.done == (EVENT_GOAL_REACHED in result.events
                                   or EVENT_TIMEOUT in result.events)
            assert result.achieved == env.state.position
            if result.done:
                break


def test_trajectories_bit_reproducible():
    scn = obstacle_course(max_steps=60)
    rng = np.random.default_rng(9)
    actions = rng.uniform(-1, 1, size=(60, 2))

    def run():
        env = GoalReachEnv(scn)
        _, obs = env.reset(77)
        trace = [obs]
        for a in actions:
            result = env.step(a)
            trace.append(result.observation)
            trace.append(np.array([result.reward]))
            if result.done:
                break
        return np.concatenate(trace)

    assert np.array_equal(run(), run())


def test_vehicle_never_escapes_or_enters_obstacles():
    rng = np.random.default_rng(21)
    for trial in range(40):
        scn = random_scenario(rng)
        env = GoalReachEnv(scn.with_max_steps(80))
        env.reset(int(rng.integers(1 << 31)))
        while not env.done:
            env.step(rng.uniform(-1, 1, size=2))
            x, y = env.state.position
            assert 0.0 <= x <= scn.width and 0.0 <= y <= scn.height
            assert not any(r.contains(x, y, strict=True) for r in scn.obstacles)


# --- dogfight -------------------------------------------------------------

def small_dogfight(**overrides):
    defaults = dict(width=4000.0, height=4000.0, goal=(2000.0, 2000.0), max_steps=100)
    defaults.update(overrides)
    return Scenario(**defaults)


def place(world, v0, v1):
    world._vehicles = [v0, v1]
    world._steps = 0
    world._done = False


def test_dogfight_rewards_couple_in_firing_geometry():
    scn = small_dogfight()
    world = DogfightWorld(scn)
    place(world,
          VehicleState(x=1000.0, y=2000.0, heading=0.0),
          VehicleState(x=2000.0, y=2000.0, heading=0.0))
    r0, r1 = world.step((0.0, 0.0), (0.0, 0.0))
    assert r0.reward == 1.0
    assert r1.reward == -1.0
    assert not r0.done and not r1.done
    assert r0.reward + r1.reward == 0.0


def test_dogfight_mutual_kill_inside_r_min():
    scn = small_dogfight()
    world = DogfightWorld(scn)
    place(world,
          VehicleState(x=2000.0, y=2000.0, heading=0.0),
          VehicleState(x=2060.0, y=2000.0, heading=0.0))
    r0, r1 = world.step((0.0, 0.0), (0.0, 0.0))
    assert r0.reward == -10.0 and r1.reward == -10.0
    assert r0.done and r1.done
    assert EVENT_PROXIMITY_KILL in r0.events and EVENT_PROXIMITY_KILL in r1.events


def test_dogfight_head_on_zero_rewards():
    scn = small_dogfight()
    world = DogfightWorld(scn)
    place(world,
          VehicleState(x=1000.0, y=2000.0, heading=0.0),
          VehicleState(x=2000.0, y=2000.0, heading=math.pi))
    r0, r1 = world.step((0.0, 0.0), (0.0, 0.0))
    assert r0.reward == 0.0 and r1.reward == 0.0


def test_dogfight_wall_hit_penalty_added():
    scn = small_dogfight()
    world = DogfightWorld(scn)
    place(world,
          VehicleState(x=20.0, y=2000.0, heading=math.pi, speed=300.0),
          VehicleState(x=3000.0, y=1000.0, heading=0.0))
    r0, r1 = world.step((1.0, 0.0), (0.0, 0.0))
    assert EVENT_WALL_HIT in r0.events
    assert r0.reward <= -100.0
    assert EVENT_WALL_HIT not in r1.events


def test_dogfight_simultaneous_advance_uses_pre_step_states():
    scn = small_dogfight()
    world = DogfightWorld(scn)
    v0 = VehicleState(x=1000.0, y=2000.0, heading=0.0, speed=100.0)
    v1 = VehicleState(x=2500.0, y=2000.0, heading=0.0, speed=100.0)
    place(world, v0, v1)
    world.step((0.0, 0.0), (0.0, 0.0))
    s0, s1 = world.vehicles
    # both moved from their own pre-step poses by the same rule
    assert s0.x == pytest.approx(1000.0 + 95.0 * scn.dt)
    assert s1.x == pytest.approx(2500.0 + 95.0 * scn.dt)


def test_dogfight_timeout():
    scn = small_dogfight(max_steps=3)
    world = DogfightWorld(scn)
    place(world,
          VehicleState(x=500.0, y=500.0, heading=0.0),
          VehicleState(x=3500.0, y=3500.0, heading=0.0))
    for _ in range(2):
        r0, _ = world.step((0.0, 0.0), (0.0, 0.0))
        assert not r0.done
    r0, r1 = world.step((0.0, 0.0), (0.0, 0.0))
    assert r0.done and EVENT_TIMEOUT in r0.events


def test_dogfight_reset_and_observation():
    scn = small_dogfight()
    world = DogfightWorld(scn)
    o0, o1 = world.reset(11)
    assert o0.shape == (9,) and o1.shape == (9,)
    assert np.all(np.abs(o0) <= 1.0) and np.all(np.abs(o1) <= 1.0)
    # perspective swap: opponent fields of one are own fields of the other
    assert o0[5] == o1[0] and o0[6] == o1[1]
    assert o1[5] == o0[0] and o1[6] == o0[1]
    v0, v1 = world.vehicles
    assert math.hypot(v0.x - v1.x, v0.y - v1.y) >= 2.0 * scn.r_min
    # determinism
    p0, p1 = DogfightWorld(scn).reset(11)
    assert np.array_equal(o0, p0) and np.array_equal(o1, p1)


def test_dogfight_bearing_zero_when_facing_opponent():
    scn = small_dogfight()
    world = DogfightWorld(scn)
    place(world,
          VehicleState(x=1000.0, y=1000.0, heading=math.pi / 4),
          VehicleState(x=2000.0, y=2000.0, heading=0.0))
    obs = world.observe(0)
    assert obs[8] == pytest.approx(0.0, abs=1e-12)


def test_dogfight_invalid_agent_id():
    world = DogfightWorld(small_dogfight())
    world.reset(0)
    with pytest.raises(InputError):
        world.observe(2)
