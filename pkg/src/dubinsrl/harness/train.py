"""Training orchestration: exploration/training/validation schedule, BC
seeding, shared-buffer dogfight self-play, metrics, and checkpointing."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DivergenceError
from ..expert import bc_pretrain, collect_demonstrations, seed_buffer
from ..net.client import RemoteEnv, vector_collect
from ..replay import ReplayBuffer, Transition, store_episode
from ..sim.env import DogfightWorld, GoalReachEnv, goal_descriptor
from ..sim.rewards import EVENT_GOAL_REACHED, EVENT_WALL_HIT
from ..sim.scenario import Scenario, load_scenario
from ..td3 import (
    DETERMINISTIC,
    EXPLORE,
    Td3Agent,
    Td3Config,
    goal_batch_builder,
    plain_batch_builder,
    select_action,
    train_step,
)
from .config import RunConfig, save_run_config
from .metrics import MetricsWriter

GOAL_INPUT_DIM = 14 + 2  # observation plus goal descriptor
DOGFIGHT_INPUT_DIM = 9

# validation never samples noise; any config with the right action box works
_VALIDATE_CONFIG = Td3Config()


def derive_seed(master: int, *key: int) -> int:
    """Deterministic child seed from a master seed and an integer key path."""
    ss = np.random.SeedSequence((int(master),) + tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def relabel_reward_fn(scenario: Scenario):
    """Reward recomputation hook handed to hindsight relabeling."""
    from ..sim.rewards import goal_reward

    def fn(position, goal, wall_hit, goal_reached):
        events = set()
        if wall_hit:
            events.add(EVENT_WALL_HIT)
        if goal_reached:
            events.add(EVENT_GOAL_REACHED)
        return goal_reward(None, position, goal, events, scenario)

    return fn


def network_input(obs, position, scenario: Scenario) -> np.ndarray:
    return np.concatenate([obs, goal_descriptor(position, scenario.goal, scenario)])


@dataclass
class ValidationPoint:
    index: int
    after_episode: int
    mean_return: float
    success_rate: float


@dataclass
class TrainResult:
    output_dir: str
    metrics_path: str
    final_checkpoint: str
    best_checkpoint: str | None
    validations: list[ValidationPoint] = field(default_factory=list)
    diverged: bool = False


def validate(agent: Td3Agent, scenario: Scenario, n_episodes: int = 30,
             seed: int = 0) -> tuple[float, float]:
    """Deterministic-policy episodes on held-out seeds.

    Returns (mean episodic return, fraction of episodes reaching the goal).
    Mutates neither the agent nor any buffer.
    """
    env = GoalReachEnv(scenario)
    returns = []
    successes = 0
    config = _VALIDATE_CONFIG
    for j in range(n_episodes):
        state, obs = env.reset(derive_seed(seed, 1, j))
        total = 0.0
        while not env.done:
            x = network_input(obs, env.state.position, scenario)
            action = select_action(agent, x, DETERMINISTIC, None, config)
            result = env.step(action)
            total += result.reward
            obs = result.observation
            if EVENT_GOAL_REACHED in result.events:
                successes += 1
        returns.append(total)
    return float(np.mean(returns)), successes / n_episodes


def _load_scenario_for_run(config: RunConfig) -> Scenario:
    if not config.scenario:
        raise ConfigError("config.scenario must name a scenario file")
    scenario = load_scenario(config.scenario)
    return scenario.with_max_steps(config.schedule.steps_per_episode)


class _EpisodeTracker:
    """Per-environment accumulation of one episode's transitions and stats."""

    def __init__(self, exploratory: bool):
        self.transitions: list[Transition] = []
        self.exploratory = exploratory
        self.reward_sum = 0.0
        self.wall_hits = 0
        self.success = False
        self.actor_losses: list[float] = []
        self.critic_losses1: list[float] = []
        self.critic_losses2: list[float] = []

    def add(self, transition: Transition, events) -> None:
        self.transitions.append(transition)
        self.reward_sum += transition.reward
        if EVENT_WALL_HIT in events:
            self.wall_hits += 1
        if EVENT_GOAL_REACHED in events:
            self.success = True

    def record(self, phase: str, episode: int, total_env_steps: int, started: float) -> dict:
        rec = {
            "phase": phase,
            "episode": episode,
            "steps": len(self.transitions),
            "total_env_steps": total_env_steps,
            "return": self.reward_sum,
            "success": self.success,
            "wall_hits": self.wall_hits,
            "actor_loss": (float(np.mean(self.actor_losses))
                           if self.actor_losses else None),
            "critic_loss1": (float(np.mean(self.critic_losses1))
                             if self.critic_losses1 else None),
            "critic_loss2": (float(np.mean(self.critic_losses2))
                             if self.critic_losses2 else None),
            "wall_seconds": time.monotonic() - started,
        }
        return rec


def train(config: RunConfig) -> TrainResult:
    """Goal-reaching training: optional BC, random exploration, then one
    learner update per environment step with periodic validation."""
    scenario = _load_scenario_for_run(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_run_config(config, out / "config.json")
    metrics_path = out / "metrics.jsonl"
    sched = config.schedule
    reward_fn = relabel_reward_fn(scenario)

    agent = Td3Agent(GOAL_INPUT_DIM, 2, hidden=config.hidden,
                     seed=derive_seed(config.agent_seed, 0))
    buffer = ReplayBuffer(config.buffer_capacity)
    noise_rng = np.random.default_rng(derive_seed(config.agent_seed, 1))
    buffer_rng = np.random.default_rng(derive_seed(config.agent_seed, 2))
    explore_rng = np.random.default_rng(derive_seed(config.env_seed, 2))
    builder = goal_batch_builder(scenario.width, scenario.height)

    result = TrainResult(
        output_dir=str(out),
        metrics_path=str(metrics_path),
        final_checkpoint=str(out / "checkpoint_final.ckpt"),
        best_checkpoint=None,
    )

    # behavioral cloning: demonstrations feed the actor, the buffer, or both
    if config.bc.demo_episodes > 0:
        episodes, demos = collect_demonstrations(
            scenario, config.bc.demo_episodes, derive_seed(config.env_seed, 4))
        if config.bc.pretrain_actor:
            bc_rng = np.random.default_rng(derive_seed(config.agent_seed, 3))
            bc_pretrain(agent.actor, demos, epochs=config.bc.pretrain_epochs,
                        lr=config.bc.pretrain_lr,
                        holdout_fraction=config.bc.holdout_fraction,
                        rng=bc_rng, batch_size=config.bc.pretrain_batch_size,
                        lr_decay=config.bc.pretrain_lr_decay)
            agent.sync_targets()
        if config.bc.seed_buffer:
            seed_buffer(buffer, episodes, her_enabled=config.her_enabled,
                        reward_fn=reward_fn, goal_radius=scenario.goal_radius)

    started = time.monotonic()
    total_env_steps = 0
    best_return = -np.inf
    validation_index = 0

    with MetricsWriter(metrics_path) as metrics:

        def run_validation(after_episode: int) -> ValidationPoint:
            nonlocal validation_index, best_return
            mean_return, success_rate = validate(
                agent, scenario, sched.validation_episodes,
                seed=derive_seed(config.env_seed, 5))
            validation_index += 1
            point = ValidationPoint(validation_index, after_episode, mean_return, success_rate)
            result.validations.append(point)
            metrics.write({
                "phase": "validate",
                "index": validation_index,
                "after_episode": after_episode,
                "total_env_steps": total_env_steps,
                "mean_return": mean_return,
                "success_rate": success_rate,
                "wall_seconds": time.monotonic() - started,
            })
            agent.save(out / "checkpoint_last.ckpt")
            if mean_return > best_return:
                best_return = mean_return
                agent.save(out / "checkpoint_best.ckpt")
                result.best_checkpoint = str(out / "checkpoint_best.ckpt")
            return point

        if config.remote.mode == "remote":
            total_env_steps = _run_remote_phases(
                config, scenario, agent, buffer, builder, reward_fn,
                noise_rng, buffer_rng, explore_rng, metrics, run_validation,
                started, result)
        else:
            env = GoalReachEnv(scenario)

            # phase 1: uniformly random actions, storage only, no learning
            for episode in range(sched.exploration_episodes):
                tracker = _EpisodeTracker(exploratory=True)
                _, obs = env.reset(derive_seed(config.env_seed, 0, episode))
                while not env.done:
                    action = explore_rng.uniform(-1.0, 1.0, size=2)
                    obs = _step_and_track(env, obs, action, scenario, tracker)
                total_env_steps += len(tracker.transitions)
                store_episode(buffer, tracker.transitions, config.her_enabled,
                              reward_fn=reward_fn, goal_radius=scenario.goal_radius)
                metrics.write(tracker.record("explore", episode, total_env_steps, started))

            # phase 2: one train step per environment step
            try:
                for episode in range(sched.total_episodes):
                    tracker = _EpisodeTracker(exploratory=False)
                    _, obs = env.reset(derive_seed(config.env_seed, 1_000_000, episode))
                    while not env.done:
                        x = network_input(obs, env.state.position, scenario)
                        action = select_action(agent, x, EXPLORE, noise_rng, config.td3)
                        obs = _step_and_track(env, obs, action, scenario, tracker)
                        report = train_step(agent, buffer, config.td3, buffer_rng, builder)
                        _accumulate_losses(tracker, report)
                    total_env_steps += len(tracker.transitions)
                    store_episode(buffer, tracker.transitions, config.her_enabled,
                                  reward_fn=reward_fn, goal_radius=scenario.goal_radius)
                    metrics.write(tracker.record("train", episode, total_env_steps, started))
                    if (episode + 1) % sched.validation_every == 0:
                        point = run_validation(episode + 1)
                        if (sched.stop_success_rate is not None
                                and point.success_rate >= sched.stop_success_rate):
                            break
            except DivergenceError:
                # parameters still hold the last pre-update values
                result.diverged = True

    agent.save(result.final_checkpoint)
    return result


def _step_and_track(env: GoalReachEnv, obs, action, scenario, tracker: _EpisodeTracker):
    pre_position = env.state.position
    result = env.step(action)
    tracker.add(Transition(
        obs=obs,
        goal=scenario.goal,
        action=np.asarray(action, dtype=np.float64),
        reward=result.reward,
        next_obs=result.observation,
        done=result.done,
        achieved=pre_position,
        achieved_next=result.achieved,
        wall_hit=EVENT_WALL_HIT in result.events,
    ), result.events)
    return result.observation


def _accumulate_losses(tracker: _EpisodeTracker, report) -> None:
    if report.performed:
        tracker.critic_losses1.append(report.critic_loss1)
        tracker.critic_losses2.append(report.critic_loss2)
        if report.actor_loss is not None:
            tracker.actor_losses.append(report.actor_loss)


def _parse_address(address: str) -> tuple[str, int]:
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigError(f"bad server address {address!r}, expected host:port")
    return host, int(port)


def _run_remote_phases(config, scenario, agent, buffer, builder, reward_fn,
                       noise_rng, buffer_rng, explore_rng, metrics,
                       run_validation, started, result) -> int:
    """Lockstep variant: one learner drives N servers, collecting one
    transition from each environment per tick and training once per
    collected transition."""
    sched = config.schedule
    envs = [RemoteEnv.connect(_parse_address(a), scenario)
            for a in config.remote.addresses]
    n = len(envs)

    episode_counter = 0          # global episode start order
    completed_train_episodes = 0
    completed_explore_episodes = 0
    total_env_steps = 0
    exploration_target = sched.exploration_episodes

    def seed_stream(i):
        k = 0
        while True:
            yield derive_seed(config.env_seed, 2_000_000 + i, k)
            k += 1

    streams = [seed_stream(i) for i in range(n)]

    def begin_episode(i: int) -> None:
        nonlocal episode_counter
        trackers[i] = _EpisodeTracker(exploratory=episode_counter < exploration_target)
        episode_counter += 1

    trackers = [None] * n
    for i in range(n):
        begin_episode(i)

    def policy(i, obs):
        if trackers[i].exploratory:
            return explore_rng.uniform(-1.0, 1.0, size=2)
        x = np.concatenate([obs, goal_descriptor(envs[i].last_achieved,
                                                 scenario.goal, scenario)])
        return select_action(agent, x, EXPLORE, noise_rng, config.td3)

    stop = False
    try:
        while not stop:
            ticks = vector_collect(envs, policy, 1, streams)
            for i, records in enumerate(ticks):
                for record in records:
                    transition = Transition(
                        obs=record.obs, goal=scenario.goal, action=record.action,
                        reward=record.reward, next_obs=record.next_obs,
                        done=record.done, achieved=record.achieved,
                        achieved_next=record.achieved_next,
                        wall_hit=EVENT_WALL_HIT in record.events,
                    )
                    trackers[i].add(transition, record.events)
                    if not trackers[i].exploratory:
                        report = train_step(agent, buffer, config.td3, buffer_rng, builder)
                        _accumulate_losses(trackers[i], report)
                    if record.done:
                        tracker = trackers[i]
                        total_env_steps += len(tracker.transitions)
                        store_episode(buffer, tracker.transitions, config.her_enabled,
                                      reward_fn=reward_fn,
                                      goal_radius=scenario.goal_radius)
                        phase = "explore" if tracker.exploratory else "train"
                        index = (completed_explore_episodes if tracker.exploratory
                                 else completed_train_episodes)
                        metrics.write(tracker.record(phase, index, total_env_steps, started))
                        if tracker.exploratory:
                            completed_explore_episodes += 1
                        else:
                            completed_train_episodes += 1
                            if completed_train_episodes % sched.validation_every == 0:
                                point = run_validation(completed_train_episodes)
                                if (sched.stop_success_rate is not None
                                        and point.success_rate >= sched.stop_success_rate):
                                    stop = True
                            if completed_train_episodes >= sched.total_episodes:
                                stop = True
                        begin_episode(i)
    except DivergenceError:
        result.diverged = True
    finally:
        for env in envs:
            env.close()
    return total_env_steps


def train_dogfight(config: RunConfig) -> tuple[TrainResult, TrainResult]:
    """1v1 self-play: two independent learners, both pushing into and
    sampling from one shared replay buffer. No goal conditioning, no
    hindsight relabeling."""
    scenario = _load_scenario_for_run(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_run_config(config, out / "config.json")
    metrics_path = out / "metrics.jsonl"
    sched = config.schedule

    world = DogfightWorld(scenario)
    agents = [
        Td3Agent(DOGFIGHT_INPUT_DIM, 2, hidden=config.hidden,
                 seed=derive_seed(config.agent_seed, 10 + i))
        for i in (0, 1)
    ]
    buffer = ReplayBuffer(config.buffer_capacity)
    noise_rngs = [np.random.default_rng(derive_seed(config.agent_seed, 20 + i))
                  for i in (0, 1)]
    buffer_rngs = [np.random.default_rng(derive_seed(config.agent_seed, 30 + i))
                   for i in (0, 1)]
    builder = plain_batch_builder()

    paths = [str(out / f"checkpoint_agent{i}_final.ckpt") for i in (0, 1)]
    results = tuple(TrainResult(output_dir=str(out), metrics_path=str(metrics_path),
                                final_checkpoint=paths[i], best_checkpoint=None)
                    for i in (0, 1))
    started = time.monotonic()
    total_env_steps = 0

    with MetricsWriter(metrics_path) as metrics:
        exploration = sched.exploration_episodes
        try:
            for episode in range(exploration + sched.total_episodes):
                exploratory = episode < exploration
                world.reset(derive_seed(config.env_seed, 3_000_000, episode))
                trackers = [_EpisodeTracker(exploratory), _EpisodeTracker(exploratory)]
                while not world.done:
                    pre = [world.observe(0), world.observe(1)]
                    pre_pos = [v.position for v in world.vehicles]
                    if exploratory:
                        actions = [noise_rngs[i].uniform(-1.0, 1.0, size=2) for i in (0, 1)]
                    else:
                        actions = [select_action(agents[i], pre[i], EXPLORE,
                                                 noise_rngs[i], config.td3)
                                   for i in (0, 1)]
                    step_results = world.step(actions[0], actions[1])
                    for i in (0, 1):
                        r = step_results[i]
                        trackers[i].add(Transition(
                            obs=pre[i], goal=None,
                            action=np.asarray(actions[i], dtype=np.float64),
                            reward=r.reward, next_obs=r.observation, done=r.done,
                            achieved=pre_pos[i], achieved_next=r.achieved,
                            wall_hit=EVENT_WALL_HIT in r.events,
                        ), r.events)
                        buffer.push(trackers[i].transitions[-1])
                    if not exploratory:
                        for i in (0, 1):
                            report = train_step(agents[i], buffer, config.td3,
                                                buffer_rngs[i], builder)
                            _accumulate_losses(trackers[i], report)
                total_env_steps += len(trackers[0].transitions)
                phase = "explore" if exploratory else "train"
                index = episode if exploratory else episode - exploration
                for i in (0, 1):
                    record = trackers[i].record(phase, index, total_env_steps, started)
                    record["agent"] = i
                    metrics.write(record)
        except DivergenceError:
            for r in results:
                r.diverged = True

    for i in (0, 1):
        agents[i].save(paths[i])
    return results
