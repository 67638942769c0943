"""Goal-conditioned ring replay buffer with final-state hindsight relabeling.

A stored goal is a position in meters; the arena-normalized descriptor fed
to networks is derived at batch-assembly time. Dogfight transitions carry
goal=None and skip relabeling entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, InsufficientDataError
from .nn.checkpoint import read_container, write_container

DEFAULT_CAPACITY = 1_000_000


@dataclass(frozen=True)
class Transition:
    obs: np.ndarray
    goal: tuple[float, float] | None
    action: np.ndarray
    reward: float
    next_obs: np.ndarray
    done: bool
    achieved: tuple[float, float]       # vehicle position before the step
    achieved_next: tuple[float, float]  # vehicle position after the step
    wall_hit: bool = False              # kept so relabeling can preserve the penalty


Episode = list  # ordered Transitions sharing one goal


class ReplayBuffer:
    """Fixed-capacity ring. Once full, each push overwrites the oldest entry."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise InputError("capacity must be positive")
        self.capacity = capacity
        self._storage: list[Transition] = []
        self._cursor = 0

    def __len__(self) -> int:
        return len(self._storage)

    @property
    def cursor(self) -> int:
        return self._cursor

    def push(self, transition: Transition) -> None:
        if len(self._storage) < self.capacity:
            self._storage.append(transition)
            self._cursor = (self._cursor + 1) % self.capacity
        else:
            self._storage[self._cursor] = transition
            self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        """Uniform with replacement over the current contents."""
        if len(self._storage) < batch_size:
            raise InsufficientDataError(
                f"buffer holds {len(self._storage)} transitions, need {batch_size}")
        indices = rng.integers(0, len(self._storage), size=batch_size)
        return [self._storage[i] for i in indices]

    def __iter__(self):
        return iter(self._storage)


def her_relabel(episode: Episode, reward_fn, goal_radius: float) -> Episode:
    """Relabel an episode against its own final achieved position.

    The new goal is achieved_next of the last transition. Rewards are
    recomputed by reward_fn(position, goal, wall_hit, goal_reached); done is
    re-evaluated against the new goal, and the copy truncates at the first
    transition that attains it. obs, action, and achieved fields are shared
    untouched; the original episode is not modified.
    """
    if not episode:
        raise InputError("cannot relabel an empty episode")
    new_goal = episode[-1].achieved_next
    relabeled: Episode = []
    for t in episode:
        dist = math.hypot(t.achieved_next[0] - new_goal[0], t.achieved_next[1] - new_goal[1])
        reached = dist <= goal_radius
        reward = reward_fn(t.achieved_next, new_goal, t.wall_hit, reached)
        relabeled.append(replace(t, goal=new_goal, reward=reward, done=reached))
        if reached:
            break
    return relabeled


def store_episode(buffer: ReplayBuffer, episode: Episode, her_enabled: bool = False,
                  reward_fn=None, goal_radius: float | None = None) -> int:
    """Push an episode, originals first, then hindsight copies when enabled.

    Returns the number of transitions pushed.
    """
    for t in episode:
        buffer.push(t)
    pushed = len(episode)
    if her_enabled and episode:
        if reward_fn is None or goal_radius is None:
            raise InputError("her_enabled requires reward_fn and goal_radius")
        for t in her_relabel(episode, reward_fn, goal_radius):
            buffer.push(t)
            pushed += 1
    return pushed


def save_buffer(buffer: ReplayBuffer, path) -> None:
    """Snapshot to disk for resumable runs; same container family as checkpoints."""
    transitions = list(buffer)
    n = len(transitions)
    goal_conditioned = n > 0 and transitions[0].goal is not None
    if any((t.goal is not None) != goal_conditioned for t in transitions):
        raise InputError("cannot snapshot a buffer mixing goal and goal-free transitions")
    arrays = {
        "obs": np.stack([t.obs for t in transitions]) if n else np.zeros((0, 0)),
        "action": np.stack([t.action for t in transitions]) if n else np.zeros((0, 0)),
        "reward": np.array([t.reward for t in transitions]),
        "next_obs": np.stack([t.next_obs for t in transitions]) if n else np.zeros((0, 0)),
        "done": np.array([1.0 if t.done else 0.0 for t in transitions]),
        "achieved": np.array([t.achieved for t in transitions]).reshape(n, 2),
        "achieved_next": np.array([t.achieved_next for t in transitions]).reshape(n, 2),
        "wall_hit": np.array([1.0 if t.wall_hit else 0.0 for t in transitions]),
    }
    if goal_conditioned:
        arrays["goal"] = np.array([t.goal for t in transitions]).reshape(n, 2)
    meta = {
        "kind": "replay_buffer",
        "capacity": buffer.capacity,
        "cursor": buffer.cursor,
        "size": n,
        "goal_conditioned": goal_conditioned,
    }
    write_container(path, arrays, meta)


def load_buffer(path) -> ReplayBuffer:
    arrays, meta = read_container(path)
    if meta.get("kind") != "replay_buffer":
        raise InputError(f"{path} is not a replay-buffer snapshot")
    buffer = ReplayBuffer(capacity=int(meta["capacity"]))
    n = int(meta["size"])
    goal_conditioned = bool(meta["goal_conditioned"])
    for i in range(n):
        buffer.push(Transition(
            obs=arrays["obs"][i].copy(),
            goal=tuple(arrays["goal"][i]) if goal_conditioned else None,
            action=arrays["action"][i].copy(),
            reward=float(arrays["reward"][i]),
            next_obs=arrays["next_obs"][i].copy(),
            done=bool(arrays["done"][i]),
            achieved=tuple(arrays["achieved"][i]),
            achieved_next=tuple(arrays["achieved_next"][i]),
            wall_hit=bool(arrays["wall_hit"][i]),
        ))
    # restore the ring position so overwrite order survives the roundtrip
    buffer._cursor = int(meta["cursor"])
    return buffer
