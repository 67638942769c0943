"""Scripted pursuit expert, demonstration collection, and behavior cloning.

The expert is a pure-pursuit controller: steer to cancel the bearing error
to the goal, full throttle while outside a braking envelope, brake inside
it. Its demonstrations seed the replay buffer and can pretrain the actor by
supervised regression on (network input, expert action) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .nn.adam import init_adam, adam_step
from .nn.checkpoint import read_container, write_container
from .nn.mlp import Mlp, backward, forward
from .replay import Episode, ReplayBuffer, Transition, store_episode
from .sim.env import GoalReachEnv, goal_descriptor
from .sim.rewards import EVENT_WALL_HIT
from .sim.scenario import Scenario
from .sim.vehicle import ACCEL_GAIN, MAX_TURN, VehicleState, wrap_angle

# Speed below which the expert coasts instead of braking near the goal.
_COAST_SPEED = 25.0


@dataclass(frozen=True)
class DemoSet:
    """Supervised (network input, expert action) pairs, i.i.d. for cloning."""

    inputs: np.ndarray   # (N, obs_dim + 2)
    actions: np.ndarray  # (N, 2)

    def __len__(self) -> int:
        return self.inputs.shape[0]


def expert_action(state: VehicleState, goal, goal_radius: float = 50.0) -> np.ndarray:
    """Pure-pursuit (throttle, steer) command toward a goal position.

    Steering cancels the bearing error within one step where possible
    (saturating at full deflection); the sign convention matches the
    vehicle's right-turn-positive steering. Throttle is full ahead outside
    the braking envelope speed^2/(2*500) + goal_radius/2, braking inside it,
    and released near zero speed so friction can finish the stop. The
    envelope standoff stays below the capture radius so the vehicle always
    penetrates it rather than parking outside.
    """
    bearing_error = wrap_angle(math.atan2(goal[1] - state.y, goal[0] - state.x) - state.heading)
    steer = min(1.0, max(-1.0, -bearing_error / MAX_TURN))
    distance = math.hypot(goal[0] - state.x, goal[1] - state.y)
    envelope = state.speed ** 2 / (2.0 * ACCEL_GAIN) + 0.5 * goal_radius
    if distance > envelope:
        throttle = 1.0
    elif abs(state.speed) > _COAST_SPEED:
        throttle = -1.0
    else:
        throttle = 0.0
    return np.array([throttle, steer])


def collect_demonstrations(scenario: Scenario, n_episodes: int,
                           seed: int) -> tuple[list[Episode], DemoSet]:
    """Run the expert in the live environment.

    Returns full transition episodes (for buffer seeding) and the flattened
    (input, action) pairs (for supervised pretraining). Deterministic in
    seed.
    """
    master = np.random.default_rng(seed)
    env = GoalReachEnv(scenario)
    episodes: list[Episode] = []
    all_inputs = []
    all_actions = []
    for _ in range(n_episodes):
        episode_seed = int(master.integers(0, 2 ** 63 - 1))
        state, obs = env.reset(episode_seed)
        episode: Episode = []
        while not env.done:
            action = expert_action(state, scenario.goal, scenario.goal_radius)
            net_input = np.concatenate([obs, goal_descriptor(state.position, scenario.goal, scenario)])
            result = env.step(action)
            episode.append(Transition(
                obs=obs,
                goal=scenario.goal,
                action=action,
                reward=result.reward,
                next_obs=result.observation,
                done=result.done,
                achieved=state.position,
                achieved_next=result.achieved,
                wall_hit=EVENT_WALL_HIT in result.events,
            ))
            all_inputs.append(net_input)
            all_actions.append(action)
            state = env.state
            obs = result.observation
        episodes.append(episode)
    demos = DemoSet(inputs=np.stack(all_inputs), actions=np.stack(all_actions))
    return episodes, demos


def bc_pretrain(actor: Mlp, demos: DemoSet, epochs: int, lr: float,
                holdout_fraction: float = 0.2, rng: np.random.Generator | None = None,
                batch_size: int = 256, lr_decay: float = 1.0) -> tuple[list[float], list[float]]:
    """Minimize the MSE between expert actions and actor outputs with Adam.

    Minibatched, with a held-out split evaluated every epoch. Returns the
    (train, holdout) MSE curves; the actor is trained in place. lr_decay
    multiplies the learning rate once per epoch; sharpening the bang-bang
    throttle boundary wants an annealed schedule.
    """
    n = len(demos)
    if n < 10:
        raise InputError(f"need at least 10 demonstration pairs, got {n}")
    rng = rng or np.random.default_rng(0)
    perm = rng.permutation(n)
    n_holdout = max(1, int(round(n * holdout_fraction)))
    holdout_idx = perm[:n_holdout]
    train_idx = perm[n_holdout:]
    x_hold, y_hold = demos.inputs[holdout_idx], demos.actions[holdout_idx]
    x_train, y_train = demos.inputs[train_idx], demos.actions[train_idx]

    adam = init_adam(actor)
    n_out = actor.output_dim
    train_curve = []
    holdout_curve = []
    epoch_lr = lr
    for _ in range(epochs):
        order = rng.permutation(len(x_train))
        epoch_losses = []
        for start in range(0, len(order), batch_size):
            idx = order[start:start + batch_size]
            xb, yb = x_train[idx], y_train[idx]
            pred, cache = forward(actor, xb)
            err = pred - yb
            loss = float(np.mean(err ** 2))
            grads, _ = backward(actor, cache, 2.0 * err / n_out)
            adam_step(actor, grads, adam, epoch_lr)
            epoch_losses.append(loss)
        epoch_lr *= lr_decay
        train_curve.append(float(np.mean(epoch_losses)))
        pred_hold, _ = forward(actor, x_hold)
        holdout_curve.append(float(np.mean((pred_hold - y_hold) ** 2)))
    return train_curve, holdout_curve


def seed_buffer(buffer: ReplayBuffer, episodes: list[Episode], her_enabled: bool = False,
                reward_fn=None, goal_radius: float | None = None) -> int:
    """Store expert episodes (with hindsight copies when enabled)."""
    pushed = 0
    for episode in episodes:
        pushed += store_episode(buffer, episode, her_enabled,
                                reward_fn=reward_fn, goal_radius=goal_radius)
    return pushed


def save_demos(demos: DemoSet, path) -> None:
    write_container(path, {"inputs": demos.inputs, "actions": demos.actions},
                    meta={"kind": "demonstrations", "count": len(demos)})


def load_demos(path) -> DemoSet:
    arrays, meta = read_container(path)
    if meta.get("kind") != "demonstrations":
        raise InputError(f"{path} is not a demonstration file")
    return DemoSet(inputs=arrays["inputs"], actions=arrays["actions"])
