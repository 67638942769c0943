"""Twin-critic actor-critic learner with delayed policy updates.

The update rule: both critics regress to a shared clipped double-Q target
built from smoothed target-policy actions; the actor ascends the first
critic once every policy_delay critic updates, after which all three target
networks are polyak-averaged toward their live counterparts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, InputError, ShapeMismatchError
from .nn.adam import AdamState, adam_step, init_adam
from .nn.checkpoint import load_networks, save_networks
from .nn.mlp import Mlp, backward, forward, init_mlp
from .replay import ReplayBuffer, Transition

DETERMINISTIC = "deterministic"
EXPLORE = "explore"


@dataclass
class Td3Config:
    gamma: float = 0.99
    rho: float = 0.995                 # polyak retention of the target networks
    actor_lr: float = 3e-4
    critic_lr: float = 3e-4
    target_noise_sigma: float = 0.2
    target_noise_clip: float = 0.5
    policy_delay: int = 2              # one actor update per this many critic updates
    batch_size: int = 256
    explore_sigma: float = 0.1         # fixed for a whole run
    epsilon_random: float = 0.1        # chance of a fully random exploratory action
    action_low: float = -1.0
    action_high: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0):
            raise InputError("gamma must be in [0, 1]")
        if not (0.0 <= self.rho <= 1.0):
            raise InputError("rho must be in [0, 1]")
        if self.target_noise_sigma < 0 or self.target_noise_clip < 0:
            raise InputError("noise parameters must be non-negative")
        if self.policy_delay < 1:
            raise InputError("policy_delay must be at least 1")
        if self.action_low >= self.action_high:
            raise InputError("need action_low < action_high")


@dataclass
class Batch:
    inputs: np.ndarray        # (B, input_dim) network inputs for s
    actions: np.ndarray       # (B, action_dim)
    rewards: np.ndarray       # (B,)
    next_inputs: np.ndarray   # (B, input_dim) network inputs for s'
    dones: np.ndarray         # (B,) 0/1


@dataclass
class UpdateReport:
    performed: bool
    critic_loss1: float | None = None
    critic_loss2: float | None = None
    actor_loss: float | None = None     # None marks a skipped (delayed) actor update
    actor_updated: bool = False
    critic_update_count: int = 0
    actor_update_count: int = 0


class Td3Agent:
    """Actor, twin critics, their target copies, and Adam states.

    Immediately after construction the targets equal the live networks
    exactly; no gradient ever flows into a target network.
    """

    def __init__(self, input_dim: int, action_dim: int,
                 hidden: tuple[int, ...] = (256, 256), seed: int = 0):
        self.input_dim = int(input_dim)
        self.action_dim = int(action_dim)
        actor_sizes = (self.input_dim, *hidden, self.action_dim)
        critic_sizes = (self.input_dim + self.action_dim, *hidden, 1)
        self.actor = init_mlp(actor_sizes, "tanh", seed=seed)
        self.critic1 = init_mlp(critic_sizes, "linear", seed=seed + 1)
        self.critic2 = init_mlp(critic_sizes, "linear", seed=seed + 2)
        self.adam_actor = init_adam(self.actor)
        self.adam_critic1 = init_adam(self.critic1)
        self.adam_critic2 = init_adam(self.critic2)
        self.critic_update_count = 0
        self.actor_update_count = 0
        self.sync_targets()

    def sync_targets(self) -> None:
        """Deep-copy live networks into the targets (construction semantics)."""
        self.actor_target = self.actor.copy()
        self.critic1_target = self.critic1.copy()
        self.critic2_target = self.critic2.copy()

    def save(self, path) -> None:
        save_networks(
            path,
            nets={
                "actor": self.actor,
                "actor_target": self.actor_target,
                "critic1": self.critic1,
                "critic2": self.critic2,
                "critic1_target": self.critic1_target,
                "critic2_target": self.critic2_target,
            },
            adam={
                "actor": self.adam_actor,
                "critic1": self.adam_critic1,
                "critic2": self.adam_critic2,
            },
            counters={
                "critic_update_count": self.critic_update_count,
                "actor_update_count": self.actor_update_count,
            },
        )

    @classmethod
    def load(cls, path, expected_input_dim: int | None = None,
             expected_action_dim: int | None = None) -> "Td3Agent":
        nets, adam, counters = load_networks(path)
        actor = nets["actor"]
        input_dim = actor.input_dim
        action_dim = actor.output_dim
        if expected_input_dim is not None and input_dim != expected_input_dim:
            raise ShapeMismatchError(
                f"checkpoint actor expects {input_dim}-wide inputs, caller requires "
                f"{expected_input_dim}")
        if expected_action_dim is not None and action_dim != expected_action_dim:
            raise ShapeMismatchError(
                f"checkpoint actor emits {action_dim} actions, caller requires "
                f"{expected_action_dim}")
        agent = cls.__new__(cls)
        agent.input_dim = input_dim
        agent.action_dim = action_dim
        agent.actor = actor
        agent.actor_target = nets["actor_target"]
        agent.critic1 = nets["critic1"]
        agent.critic2 = nets["critic2"]
        agent.critic1_target = nets["critic1_target"]
        agent.critic2_target = nets["critic2_target"]
        agent.adam_actor = adam["actor"]
        agent.adam_critic1 = adam["critic1"]
        agent.adam_critic2 = adam["critic2"]
        agent.critic_update_count = counters.get("critic_update_count", 0)
        agent.actor_update_count = counters.get("actor_update_count", 0)
        return agent


def select_action(agent: Td3Agent, network_input, mode: str,
                  rng: np.random.Generator | None, config: Td3Config) -> np.ndarray:
    """Policy action for one input, clipped to the action box.

    deterministic: the raw actor output. explore: with probability
    epsilon_random a uniform action, otherwise actor output plus Gaussian
    noise of scale explore_sigma.
    """
    x = np.asarray(network_input, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != agent.input_dim:
        raise InputError(f"network input must have width {agent.input_dim}, got {x.shape}")
    low, high = config.action_low, config.action_high
    if mode == DETERMINISTIC:
        action, _ = forward(agent.actor, x)
        return np.clip(action, low, high)
    if mode != EXPLORE:
        raise InputError(f"unknown action mode {mode!r}")
    if rng is None:
        raise InputError("explore mode requires an rng")
    if rng.random() < config.epsilon_random:
        return rng.uniform(low, high, size=agent.action_dim)
    action, _ = forward(agent.actor, x)
    noise = rng.normal(0.0, config.explore_sigma, size=agent.action_dim)
    return np.clip(action + noise, low, high)


def smooth_target_action(agent: Td3Agent, next_inputs, config: Td3Config,
                         rng: np.random.Generator) -> np.ndarray:
    """Target-policy actions with clipped Gaussian smoothing noise:
    clip(actor_target(s') + clip(eps, -c, c), low, high)."""
    out, _ = forward(agent.actor_target, next_inputs)
    noise = rng.normal(0.0, config.target_noise_sigma, size=out.shape)
    noise = np.clip(noise, -config.target_noise_clip, config.target_noise_clip)
    return np.clip(out + noise, config.action_low, config.action_high)


def compute_td_target(agent: Td3Agent, batch: Batch, config: Td3Config,
                      rng: np.random.Generator) -> np.ndarray:
    """y = r + gamma * (1 - done) * min(Q1_target, Q2_target) at smoothed actions."""
    next_actions = smooth_target_action(agent, batch.next_inputs, config, rng)
    sa = np.concatenate([batch.next_inputs, next_actions], axis=1)
    q1, _ = forward(agent.critic1_target, sa)
    q2, _ = forward(agent.critic2_target, sa)
    q_min = np.minimum(q1[:, 0], q2[:, 0])
    return batch.rewards + config.gamma * (1.0 - batch.dones) * q_min


def critic_update(agent: Td3Agent, batch: Batch, config: Td3Config,
                  rng: np.random.Generator) -> tuple[float, float]:
    """One Adam step per critic on the squared error against the shared
    target; the target is a constant (no gradient through target nets)."""
    y = compute_td_target(agent, batch, config, rng)
    sa = np.concatenate([batch.inputs, batch.actions], axis=1)
    losses = []
    pending = []
    for critic, adam in ((agent.critic1, agent.adam_critic1),
                         (agent.critic2, agent.adam_critic2)):
        q, cache = forward(critic, sa)
        err = q[:, 0] - y
        loss = float(np.mean(err ** 2))
        if not np.isfinite(loss):
            raise DivergenceError(f"critic loss diverged to {loss}")
        grads, _ = backward(critic, cache, (2.0 * err)[:, None])
        losses.append(loss)
        pending.append((critic, grads, adam))
    # apply after both losses are computed so both regress to the same target
    for critic, grads, adam in pending:
        adam_step(critic, grads, adam, config.critic_lr)
    agent.critic_update_count += 1
    return losses[0], losses[1]


def actor_update(agent: Td3Agent, batch: Batch, config: Td3Config) -> float | None:
    """Delayed policy update: maximizes the first critic at actor actions.

    Runs only when critic_update_count is a multiple of policy_delay;
    returns None when skipped. Target networks are polyak-averaged on the
    same cadence, after the actor step.
    """
    if agent.critic_update_count % config.policy_delay != 0:
        return None
    actions, actor_cache = forward(agent.actor, batch.inputs)
    sa = np.concatenate([batch.inputs, actions], axis=1)
    q, critic_cache = forward(agent.critic1, sa)
    loss = float(-np.mean(q))
    if not np.isfinite(loss):
        raise DivergenceError(f"actor loss diverged to {loss}")
    batch_size = batch.inputs.shape[0]
    # d(-mean Q)/d(s,a); the action slice seeds the actor backward pass.
    _, d_sa = backward(agent.critic1, critic_cache, -np.ones((batch_size, 1)))
    d_actions = d_sa[:, batch.inputs.shape[1]:] * batch_size
    actor_grads, _ = backward(agent.actor, actor_cache, d_actions)
    adam_step(agent.actor, actor_grads, agent.adam_actor, config.actor_lr)
    agent.actor_update_count += 1
    polyak_update(agent.actor, agent.actor_target, config.rho)
    polyak_update(agent.critic1, agent.critic1_target, config.rho)
    polyak_update(agent.critic2, agent.critic2_target, config.rho)
    return loss


def polyak_update(live: Mlp, target: Mlp, rho: float) -> Mlp:
    """target <- rho * target + (1 - rho) * live, componentwise, in place."""
    if live.layer_sizes != target.layer_sizes:
        raise InputError("polyak update between non-congruent networks")
    for lw, tw in zip(live.weights, target.weights):
        tw *= rho
        tw += (1.0 - rho) * lw
    for lb, tb in zip(live.biases, target.biases):
        tb *= rho
        tb += (1.0 - rho) * lb
    return target


def goal_batch_builder(width: float, height: float):
    """Batch assembly for goal-conditioned transitions: the network input is
    the observation concatenated with the arena-normalized goal offset."""
    dims = np.array([width, height])

    def build(transitions: list[Transition]) -> Batch:
        obs = np.stack([t.obs for t in transitions])
        next_obs = np.stack([t.next_obs for t in transitions])
        goals = np.array([t.goal for t in transitions])
        achieved = np.array([t.achieved for t in transitions])
        achieved_next = np.array([t.achieved_next for t in transitions])
        inputs = np.concatenate([obs, (goals - achieved) / dims], axis=1)
        next_inputs = np.concatenate([next_obs, (goals - achieved_next) / dims], axis=1)
        return Batch(
            inputs=inputs,
            actions=np.stack([t.action for t in transitions]),
            rewards=np.array([t.reward for t in transitions]),
            next_inputs=next_inputs,
            dones=np.array([1.0 if t.done else 0.0 for t in transitions]),
        )

    return build


def plain_batch_builder():
    """Batch assembly for transitions whose observation is the whole input."""

    def build(transitions: list[Transition]) -> Batch:
        return Batch(
            inputs=np.stack([t.obs for t in transitions]),
            actions=np.stack([t.action for t in transitions]),
            rewards=np.array([t.reward for t in transitions]),
            next_inputs=np.stack([t.next_obs for t in transitions]),
            dones=np.array([1.0 if t.done else 0.0 for t in transitions]),
        )

    return build


def train_step(agent: Td3Agent, buffer: ReplayBuffer, config: Td3Config,
               rng: np.random.Generator, batch_builder) -> UpdateReport:
    """sample -> critic update -> (possibly delayed) actor update.

    A buffer smaller than the batch size makes this a no-op with an explicit
    marker rather than an error.
    """
    if len(buffer) < config.batch_size:
        return UpdateReport(
            performed=False,
            critic_update_count=agent.critic_update_count,
            actor_update_count=agent.actor_update_count,
        )
    transitions = buffer.sample(config.batch_size, rng)
    batch = batch_builder(transitions)
    loss1, loss2 = critic_update(agent, batch, config, rng)
    actor_loss = actor_update(agent, batch, config)
    return UpdateReport(
        performed=True,
        critic_loss1=loss1,
        critic_loss2=loss2,
        actor_loss=actor_loss,
        actor_updated=actor_loss is not None,
        critic_update_count=agent.critic_update_count,
        actor_update_count=agent.actor_update_count,
    )
